use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use constalg::algebra::AlgebraPresentation;
use constalg::config::SearchConfig;
use constalg::corpus::{self, derivations_of, ModelScenario};
use constalg::derivation::{constants, diff_semisimple};
use constalg::diffop::{inner_generators, DiffOpExpr, Orientation};
use constalg::envelope::{build_envelope, top_annihilator_element, verify_frobenius_kernel, RestrictedLiePresentation};
use constalg::format::{self, AlgebraFile};
use constalg::frobenius::{frobenius_check, qf_check, QfAnalysis};
use constalg::gpi::{
    build_gpi, holds_on, is_formally_trivial, min_standard_degree, qf_decomposition, triviality_vs_br,
    GeneralizedPoly, MultilinearPoly,
};
use constalg::linalg::Subspace;
use constalg::report::{algebra_record, identity_pipeline, scenario_record, Envelope};
use constalg::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::Command;

pub struct Outcome {
    pub report: Value,
    pub status: u8,
}

fn outcome<T: Serialize>(command: &str, config: &SearchConfig, body: T, status: u8) -> Outcome {
    let report = serde_json::to_value(Envelope::new(command, *config, body)).expect("serializable report");
    Outcome { report, status }
}

pub fn load(path: &Path) -> Result<AlgebraFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {}", path.display(), e)))?;
    format::parse(&text)
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "model".into(), |s| s.to_string_lossy().into_owned())
}

/// The file's scenario, or one built from its derivations (all inner
/// derivations when none are listed).
pub fn scenario_of(path: &Path, file: &AlgebraFile) -> Result<ModelScenario> {
    if file.scenario.is_some() && !file.derivations.is_empty() {
        return ModelScenario::from_file(file);
    }
    let alg = Arc::new(file.require_algebra()?.clone());
    let derivations = if file.derivations.is_empty() {
        inner_generators(&alg)?
            .into_iter()
            .enumerate()
            .map(|(i, d)| (format!("ad({})", alg.names()[i]), d))
            .collect()
    } else {
        derivations_of(&alg, &file.derivations)?
    };
    Ok(ModelScenario {
        name: file.scenario.as_ref().map_or_else(|| stem(path), |s| s.name.clone()),
        algebra: alg,
        derivations,
        inner: None,
        expected: BTreeMap::new(),
    })
}

fn names(alg: &AlgebraPresentation, vs: &[Vec<u64>]) -> Vec<String> {
    vs.iter().map(|v| alg.format_coords(v)).collect()
}

pub fn run(command: &Command, config: &SearchConfig) -> Result<Outcome> {
    match command {
        Command::QfCheck { file } => {
            let f = load(file)?;
            let r = qf_check(f.require_algebra()?, config)?;
            Ok(outcome("qf-check", config, json!({"model": stem(file), "qf": r}), 0))
        }
        Command::FrobeniusCheck { file } => {
            let f = load(file)?;
            let r = frobenius_check(f.require_algebra()?, config)?;
            Ok(outcome("frobenius-check", config, json!({"model": stem(file), "frobenius": r}), 0))
        }
        Command::Envelope { file } => envelope(file, config),
        Command::Constants { file } => {
            let f = load(file)?;
            let s = scenario_of(file, &f)?;
            let ctx = s.context()?;
            let consts = constants(ctx.lie(), &ctx.algebra().full_space())?;
            let record = scenario_record(&s, config)?;
            let status = if record.passed() { 0 } else { 1 };
            let body = json!({
                "constants_basis": names(ctx.algebra(), &consts.basis_vectors()),
                "record": record,
            });
            Ok(outcome("constants", config, body, status))
        }
        Command::GpiBuild { file, poly, pairs } => gpi_build(file, poly, pairs.as_deref(), config),
        Command::GpiVerify { file, poly } => gpi_verify(file, poly, config),
        Command::Semiprime { file } => {
            let f = load(file)?;
            let alg = f.require_algebra()?;
            let own = alg.is_semiprime(config)?;
            let mut body = json!({"model": stem(file), "algebra": own});
            let mut status = 0;
            if !f.derivations.is_empty() {
                let s = scenario_of(file, &f)?;
                let ctx = s.context()?;
                let consts = constants(ctx.lie(), &ctx.algebra().full_space())?;
                let cv = ctx.algebra().subalgebra_presentation(&consts)?.is_semiprime(config)?;
                let ds = diff_semisimple(ctx.inner(), config)?;
                if cv.semiprime != ds.semisimple {
                    status = 1;
                }
                body["constants_semiprime"] = json!(cv.semiprime);
                body["diff_semisimple"] = json!(ds);
                body["biconditional_holds"] = json!(cv.semiprime == ds.semisimple);
            }
            Ok(outcome("semiprime", config, body, status))
        }
        Command::DiffDecompose { file } => diff_decompose(file, config),
        Command::PiSearch { file, dmax, constants: on_constants } => {
            let f = load(file)?;
            let target = if *on_constants {
                let s = scenario_of(file, &f)?;
                let ctx = s.context()?;
                let consts = constants(ctx.lie(), &ctx.algebra().full_space())?;
                ctx.algebra().subalgebra_presentation(&consts)?
            } else {
                f.require_algebra()?.clone()
            };
            let r = min_standard_degree(&target, *dmax)?;
            let body = json!({"model": stem(file), "target": if *on_constants { "constants" } else { "algebra" }, "dim": target.dim(), "result": r});
            Ok(outcome("pi-search", config, body, 0))
        }
        Command::CorpusRun { corpus } => corpus_run(corpus, config),
        Command::Normalize { file, expr } => normalize(file, expr, config),
        Command::ExportCorpus { dir } => export_corpus(dir, config),
    }
}

fn envelope(file: &Path, config: &SearchConfig) -> Result<Outcome> {
    let f = load(file)?;
    let lie = match &f.lie {
        Some(spec) => RestrictedLiePresentation::from_spec(f.p, spec)?,
        None => {
            let s = scenario_of(file, &f)?;
            let ctx = s.context()?;
            ctx.quotient_presentation()
                .cloned()
                .ok_or_else(|| Error::Invalid("formal context has no outer quotient".into()))?
        }
    };
    let env = build_envelope(&lie)?;
    env.algebra.audit()?;
    let kernel = verify_frobenius_kernel(&env, config)?;
    let top = top_annihilator_element(&env)?;
    let f_text: Vec<String> = top
        .f
        .iter()
        .zip(&env.words)
        .filter(|(&c, _)| c != 0)
        .map(|(&c, w)| if c == 1 { w.name() } else { format!("{}*{}", c, w.name()) })
        .collect();
    let status = if kernel.holds && top.annihilator_dim == 1 { 0 } else { 1 };
    let body = json!({
        "model": stem(file),
        "m": lie.dim(),
        "dim": env.dim(),
        "associativity_audit": "passed",
        "frobenius_kernel": kernel,
        "top": f_text.join(" + "),
        "top_element": top,
    });
    Ok(outcome("envelope", config, body, status))
}

fn gpi_build(file: &Path, poly: &str, pairs: Option<&[usize]>, config: &SearchConfig) -> Result<Outcome> {
    let f = load(file)?;
    let s = scenario_of(file, &f)?;
    let ctx = s.context()?;
    let alg = ctx.algebra();
    let inner = ctx.inner();
    let shape = MultilinearPoly::parse(poly, f.p)?;
    let qa = QfAnalysis::compute(&inner.b_alg, config)?;
    if qa.right_pairs.is_empty() {
        return Err(Error::Invalid("B(L) has no conjugate pairs".into()));
    }
    let chosen: Vec<usize> = pairs.map_or_else(|| vec![0; shape.arity()], |p| p.to_vec());
    if let Some(&bad) = chosen.iter().find(|&&i| i >= qa.right_pairs.len()) {
        return Err(Error::Invalid(format!(
            "pair index {} out of range; B(L) has {} right conjugate pairs",
            bad,
            qa.right_pairs.len()
        )));
    }
    let refs: Vec<_> = chosen.iter().map(|&i| &qa.right_pairs[i]).collect();
    let gp = build_gpi(&shape, &refs)?.embed(inner)?;
    let available: Vec<Value> = qa
        .right_pairs
        .iter()
        .enumerate()
        .map(|(i, pair)| {
            json!({
                "index": i,
                "dim": pair.dim(),
                "rho": names(alg, &pair.rho.basis_vectors().iter().map(|v| inner.embed(v)).collect::<Vec<_>>()),
                "lambda": names(alg, &pair.lambda.basis_vectors().iter().map(|v| inner.embed(v)).collect::<Vec<_>>()),
            })
        })
        .collect();
    let slots: Vec<String> = gp
        .slots
        .iter()
        .enumerate()
        .map(|(j, slot)| {
            let terms: Vec<String> = slot
                .iter()
                .map(|(a, b)| format!("({}) x{} ({})", alg.format_coords(a), j + 1, alg.format_coords(b)))
                .collect();
            terms.join(" + ")
        })
        .collect();
    let triv = is_formally_trivial(&gp, alg)?;
    let body = json!({
        "model": s.name,
        "polynomial": shape.to_text(),
        "pairs": chosen,
        "available_pairs": available,
        "slots": slots,
        "formal_triviality": triv,
    });
    Ok(outcome("gpi-build", config, body, 0))
}

/// `f` as an identity of `alg` itself, via single-slot unit coefficients.
fn plain_identity(f: &MultilinearPoly, alg: &AlgebraPresentation) -> GeneralizedPoly {
    GeneralizedPoly {
        shape: f.clone(),
        slots: vec![vec![(alg.unit().to_vec(), alg.unit().to_vec())]; f.arity()],
        ambient_dim: alg.dim(),
    }
}

fn gpi_verify(file: &Path, poly: &str, config: &SearchConfig) -> Result<Outcome> {
    let f = load(file)?;
    let s = scenario_of(file, &f)?;
    let ctx = s.context()?;
    let shape = MultilinearPoly::parse(poly, f.p)?;
    let consts = constants(ctx.lie(), &ctx.algebra().full_space())?;
    let consts_alg = ctx.algebra().subalgebra_presentation(&consts)?;
    let constants_satisfy = holds_on(&plain_identity(&shape, &consts_alg), &consts_alg)?.holds;
    let qa = QfAnalysis::compute(&ctx.inner().b_alg, config)?;
    let pipeline = identity_pipeline(&ctx, &qa, &shape)?;
    let br = triviality_vs_br(&ctx.inner().b_alg, &qa, &shape, config)?;
    // the identities are f(c_1(x_1), ...) exactly when L has no outer part
    let applies = ctx.m() == 0 && constants_satisfy;
    let status = if applies && !pipeline.all_hold { 1 } else { 0 };
    let body = json!({
        "model": s.name,
        "polynomial": shape.to_text(),
        "constants_satisfy": constants_satisfy,
        "pipeline_applies": applies,
        "pipeline": pipeline,
        "br_consistency": br,
    });
    Ok(outcome("gpi-verify", config, body, status))
}

fn diff_decompose(file: &Path, config: &SearchConfig) -> Result<Outcome> {
    let f = load(file)?;
    let s = scenario_of(file, &f)?;
    let ctx = s.context()?;
    let inner = ctx.inner();
    let b = &inner.b_alg;
    let alg = ctx.algebra();
    let ds = diff_semisimple(inner, config)?;
    let mut idempotents = Vec::new();
    if ds.semisimple {
        for i in 0..ds.summands.len() {
            let others: Vec<Vec<u64>> = ds
                .summands
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .flat_map(|(_, s)| s.iter().cloned())
                .collect();
            let m0 = Subspace::span(b.p(), b.dim(), &others);
            let d = qf_decomposition(inner, &m0)?;
            idempotents.push(alg.format_coords(&d.e_model));
        }
    }
    let summands: Vec<Vec<String>> = ds
        .summands
        .iter()
        .map(|s| names(alg, &s.iter().map(|v| inner.embed(v)).collect::<Vec<_>>()))
        .collect();
    let witness = ds
        .witness
        .as_ref()
        .map(|w| names(alg, &w.iter().map(|v| inner.embed(v)).collect::<Vec<_>>()));
    let body = json!({
        "model": s.name,
        "b_dim": inner.dim(),
        "semisimple": ds.semisimple,
        "exhaustive": ds.exhaustive,
        "square_zero_ideal": witness,
        "summands": summands,
        "central_idempotents": idempotents,
    });
    Ok(outcome("diff-decompose", config, body, 0))
}

fn normalize(file: &Path, expr: &str, config: &SearchConfig) -> Result<Outcome> {
    let f = load(file)?;
    let s = scenario_of(file, &f)?;
    let ctx = s.context()?;
    let alg = ctx.algebra();
    let e = DiffOpExpr::parse(expr, alg, ctx.m())?;
    let right = ctx.normalize(&e, Orientation::Right)?;
    let left = ctx.normalize(&e, Orientation::Left)?;
    let eq = ctx.equal_as_operators(&right, &left)?;
    let idempotent = ctx.normalize(&ctx.to_expr(&right), Orientation::Right)? == right
        && ctx.normalize(&ctx.to_expr(&left), Orientation::Left)? == left;
    let status = if eq.equal && idempotent { 0 } else { 1 };
    let body = json!({
        "model": s.name,
        "outer": ctx.m(),
        "input": e.to_text(alg),
        "right": ctx.to_expr(&right).to_text(alg),
        "left": ctx.to_expr(&left).to_text(alg),
        "agree": eq,
        "idempotent": idempotent,
    });
    Ok(outcome("normalize", config, body, status))
}

#[derive(Serialize)]
struct CorpusEntry {
    file: String,
    kind: &'static str,
    passed: bool,
    error: Option<String>,
    exit: u8,
    record: Option<Value>,
}

fn run_file(path: &Path, config: &SearchConfig) -> CorpusEntry {
    let file = path.file_name().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    let result = (|| -> Result<(&'static str, bool, Value)> {
        let f = load(path)?;
        if f.derivations.is_empty() {
            let r = algebra_record(&stem(path), f.require_algebra()?, config)?;
            Ok(("algebra", r.passed(), serde_json::to_value(r).expect("json")))
        } else {
            let r = scenario_record(&scenario_of(path, &f)?, config)?;
            Ok(("scenario", r.passed(), serde_json::to_value(r).expect("json")))
        }
    })();
    match result {
        Ok((kind, passed, record)) => CorpusEntry {
            file,
            kind,
            passed,
            error: None,
            exit: if passed { 0 } else { 1 },
            record: Some(record),
        },
        Err(e) => CorpusEntry {
            file,
            kind: "error",
            passed: false,
            error: Some(e.to_string()),
            exit: crate::exit_code(&e),
            record: None,
        },
    }
}

fn corpus_run(dir: &Path, config: &SearchConfig) -> Result<Outcome> {
    let entries = std::fs::read_dir(dir)
        .map_err(|e| Error::Invalid(format!("cannot read corpus directory {}: {}", dir.display(), e)))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "alg"))
        .collect();
    paths.sort();
    let records: Vec<CorpusEntry> = paths.par_iter().map(|p| run_file(p, config)).collect();
    let count = |code: u8| records.iter().filter(|r| r.exit == code).count();
    let (passed, violated, undecided, invalid) = (count(0), count(1), count(2), count(3));
    let status = if violated > 0 {
        1
    } else if invalid > 0 {
        3
    } else if undecided > 0 {
        2
    } else {
        0
    };
    let body = json!({
        "corpus": dir.display().to_string(),
        "summary": {
            "files": records.len(),
            "passed": passed,
            "failed": violated,
            "undecided": undecided,
            "input_errors": invalid,
        },
        "records": records,
    });
    Ok(outcome("corpus-run", config, body, status))
}

fn export_corpus(dir: &Path, config: &SearchConfig) -> Result<Outcome> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Invalid(format!("cannot create {}: {}", dir.display(), e)))?;
    let mut written = Vec::new();
    let mut files: Vec<(String, AlgebraFile)> = corpus::qf_corpus()?
        .into_iter()
        .map(|c| (c.name.clone(), c.to_file()))
        .collect();
    files.extend(corpus::scenarios()?.into_iter().map(|s| (s.name.clone(), s.to_file())));
    for (name, file) in files {
        let path = dir.join(format!("{}.alg", name));
        std::fs::write(&path, format::print(&file))
            .map_err(|e| Error::Invalid(format!("cannot write {}: {}", path.display(), e)))?;
        written.push(path.display().to_string());
    }
    Ok(outcome("export-corpus", config, json!({"written": written}), 0))
}
