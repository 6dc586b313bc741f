//! Replays the checked-in fuzz seeds through the same bodies as the fuzz targets.

use std::path::{Path, PathBuf};

use constalg::diffop::{truncated_context, DiffOpExpr, Orientation};
use constalg::format;
use constalg::gpi::MultilinearPoly;

fn seeds(target: &str) -> Vec<(PathBuf, String)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(PathBuf, String)> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {}", dir.display(), e))
        .map(|e| {
            let path = e.unwrap().path();
            let text = String::from_utf8_lossy(&std::fs::read(&path).unwrap()).into_owned();
            (path, text)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {}", target);
    out
}

#[test]
fn algebra_file_seeds() {
    let mut parsed = 0;
    for (path, text) in seeds("algebra_file") {
        match format::parse(&text) {
            Ok(file) => {
                let printed = format::print(&file);
                assert_eq!(format::parse(&printed).unwrap(), file, "{}", path.display());
                parsed += 1;
            }
            Err(e) => assert!(e.to_string().contains("line"), "{}: {}", path.display(), e),
        }
    }
    assert!(parsed >= 25);
}

#[test]
fn operator_expr_seeds() {
    let ctx = truncated_context(2, 2).unwrap();
    let mut parsed = 0;
    for (path, text) in seeds("operator_expr") {
        if let Ok(e) = DiffOpExpr::parse(&text, ctx.algebra(), ctx.m()) {
            let again = DiffOpExpr::parse(&e.to_text(ctx.algebra()), ctx.algebra(), ctx.m()).unwrap();
            let a = ctx.normalize(&e, Orientation::Right).unwrap();
            assert_eq!(a, ctx.normalize(&again, Orientation::Right).unwrap(), "{}", path.display());
            parsed += 1;
        }
    }
    assert!(parsed >= 8);
}

#[test]
fn multilinear_poly_seeds() {
    let mut parsed = 0;
    for (_, text) in seeds("multilinear_poly") {
        for p in [2, 3, 5] {
            if let Ok(f) = MultilinearPoly::parse(&text, p) {
                assert_eq!(MultilinearPoly::parse(&f.to_text(), p).unwrap(), f);
                parsed += 1;
            }
        }
    }
    assert!(parsed >= 15);
}
