#![no_main]

use std::sync::OnceLock;

use constalg::diffop::{truncated_context, DiffContext, DiffOpExpr, Orientation};
use libfuzzer_sys::fuzz_target;

static CTX: OnceLock<DiffContext> = OnceLock::new();

fuzz_target!(|data: &str| {
    let ctx = CTX.get_or_init(|| truncated_context(2, 2).expect("model"));
    if let Ok(e) = DiffOpExpr::parse(data, ctx.algebra(), ctx.m()) {
        let again = DiffOpExpr::parse(&e.to_text(ctx.algebra()), ctx.algebra(), ctx.m()).expect("printed expression parses");
        if e.terms.len() <= 8 && e.terms.iter().all(|t| t.factors.len() <= 8) {
            let a = ctx.normalize(&e, Orientation::Right).expect("normalizes");
            let b = ctx.normalize(&again, Orientation::Right).expect("normalizes");
            assert_eq!(a, b);
        }
    }
});
