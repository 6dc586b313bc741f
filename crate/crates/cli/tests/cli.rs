use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn corpus(name: &str) -> String {
    root().join("corpus").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_constalg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn structured(args: &[&str]) -> (Value, i32) {
    let mut all = args.to_vec();
    all.extend(["--format", "structured"]);
    let out = run(&all);
    let code = out.status.code().unwrap();
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (v, code)
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("constalg-{}-{}", tag, std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn qf_check_on_m2() {
    let (v, code) = structured(&["qf-check", &corpus("m2_gf2.alg")]);
    assert_eq!(code, 0);
    let qf = &v["body"]["qf"];
    assert_eq!(qf["q1"], true);
    assert_eq!(qf["q4"], true);
    assert_eq!(qf["q5"], true);
    assert_eq!(v["config"]["seed"], 0x5eed);
}

#[test]
fn qf_check_on_t2_is_a_finding_not_a_failure() {
    let (v, code) = structured(&["qf-check", &corpus("t2_gf2.alg")]);
    assert_eq!(code, 0);
    let qf = &v["body"]["qf"];
    assert_eq!(qf["q1"], false);
    assert_eq!(qf["q1_witness"]["side"], "right");
    assert_eq!(qf["q1_witness"]["ideal"], serde_json::json!([[0, 1, 0]]));
}

#[test]
fn malformed_input_exits_with_3_and_a_position() {
    let dir = scratch("bad");
    let path = dir.join("bad.alg");
    std::fs::write(&path, "p = 2\ndim = 2\nnames = [\"1\"]\n").unwrap();
    let out = run(&["qf-check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2, column 7"), "{}", err);
    let out = run(&["qf-check", dir.join("missing.alg").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bad_expression_reports_column() {
    let out = run(&["normalize", &corpus("m2_inner_gf2.alg"), "--expr", "l(e11) m1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("column 8"));
}

#[test]
fn normalize_agrees_across_orientations() {
    let (v, code) = structured(&["normalize", &corpus("m2_truncated_gf2.alg"), "--expr", "m1 r(e12t + e21) m1"]);
    assert_eq!(code, 0);
    assert_eq!(v["body"]["agree"]["equal"], true);
    assert_eq!(v["body"]["idempotent"], true);
}

#[test]
fn envelope_of_lie_files() {
    let (v, code) = structured(&["envelope", &corpus("lie/abelian2_gf3.alg")]);
    assert_eq!(code, 0);
    assert_eq!(v["body"]["dim"], 9);
    assert_eq!(v["body"]["top"], "m1^2*m2^2");
    let (v, code) = structured(&["envelope", &corpus("lie/toral_gf3.alg")]);
    assert_eq!(code, 0);
    assert_eq!(v["body"]["top"], "1 + 2*m1^2");
}

#[test]
fn constants_of_the_block_scenario() {
    let (v, code) = structured(&["constants", &corpus("m2_block_in_m4_gf2.alg")]);
    assert_eq!(code, 0);
    let r = &v["body"]["record"];
    assert_eq!(r["constants_dim"], 4);
    assert_eq!(r["constants_semiprime"], true);
    assert!(r["operators"].as_array().unwrap().iter().any(|o| o["nonzero"] == true));
}

#[test]
fn gpi_commands_on_m2() {
    let (v, code) = structured(&["gpi-verify", &corpus("m2_gf2.alg"), "--poly", "x1*x2 + x2*x1"]);
    assert_eq!(code, 0);
    assert_eq!(v["body"]["pipeline"]["all_hold"], true);
    assert_eq!(v["body"]["br_consistency"]["consistent"], true);
    let (v, code) = structured(&["gpi-build", &corpus("m2_gf2.alg"), "--poly", "x1", "--pairs", "0"]);
    assert_eq!(code, 0);
    assert_eq!(v["body"]["formal_triviality"]["trivial"], false);
    let (_, code) = structured(&["gpi-build", &corpus("m2_gf2.alg"), "--poly", "x1", "--pairs", "99"]);
    assert_eq!(code, 3);
}

#[test]
fn semiprime_and_decomposition() {
    let (v, code) = structured(&["semiprime", &corpus("unipotent_in_m2_gf2.alg")]);
    assert_eq!(code, 0);
    assert_eq!(v["body"]["constants_semiprime"], false);
    assert_eq!(v["body"]["biconditional_holds"], true);
    let (v, code) = structured(&["diff-decompose", &corpus("m2_plus_gf2_in_m3_gf2.alg")]);
    assert_eq!(code, 0);
    assert_eq!(v["body"]["central_idempotents"], serde_json::json!(["e33", "e11 + e22"]));
}

#[test]
fn pi_search_on_m2_and_its_constants() {
    let (v, _) = structured(&["pi-search", &corpus("m2_gf2.alg")]);
    assert_eq!(v["body"]["result"]["degree"], 4);
    let (v, _) = structured(&["pi-search", &corpus("m2_block_in_m4_gf2.alg"), "--constants"]);
    assert_eq!(v["body"]["dim"], 4);
    assert_eq!(v["body"]["result"]["degree"], 4);
}

#[test]
fn exported_corpus_matches_checked_in_files() {
    let dir = scratch("export");
    let out = run(&["export-corpus", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let mut count = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_str().unwrap().to_string();
        let fresh = std::fs::read_to_string(&path).unwrap();
        let stored = std::fs::read_to_string(root().join("corpus").join(&name)).unwrap();
        assert_eq!(fresh, stored, "{}", name);
        count += 1;
    }
    assert_eq!(count, 22);
}

#[test]
fn corpus_run_passes_and_text_output_carries_config() {
    let out = run(&["corpus-run", "--corpus", &root().join("corpus").display().to_string()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("seed: 24301"));
    assert!(text.contains("passed: 22"));
}
