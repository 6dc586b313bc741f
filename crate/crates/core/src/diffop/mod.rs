//! Differential operators built from multiplications by `B(L)` and words in
//! outer derivations, with normal forms and evaluation on finite models.
//!
//! Conventions: `x^{a^r} = x a`, `x^{a^l} = a x`, and operators compose from
//! left to right. A tensor `l (x) r` is the operator `x -> l x r`.

mod audit;
mod context;
mod expr;
mod normal;

pub use audit::{faithfulness_audit, AuditReport, OperatorEquality};
pub use context::{Certificate, DiffContext};
pub use expr::{DiffOpExpr, Factor, OpTerm, MAX_EXPONENT};
pub use normal::{NormalForm, Orientation};

use std::sync::Arc;

use crate::algebra::{unit_vector, AlgebraPresentation};
use crate::derivation::{inner_matrix, Derivation};
use crate::error::Result;
use crate::models::matrix_over_truncated;

/// All inner derivations `e_i^-` of `alg`.
pub fn inner_generators(alg: &Arc<AlgebraPresentation>) -> Result<Vec<Derivation>> {
    (0..alg.dim())
        .map(|i| Derivation::new(alg.clone(), inner_matrix(alg, &unit_vector(alg.dim(), i))))
        .collect()
}

/// `M_k(GF(p)[t]/(t^p))` with `L` spanned by the inner derivations and `d/dt`.
pub fn truncated_context(k: usize, p: u64) -> Result<DiffContext> {
    let (alg, ddt) = matrix_over_truncated(k, p)?;
    let alg = Arc::new(alg);
    let mut gens = vec![Derivation::new(alg.clone(), ddt)?];
    gens.extend(inner_generators(&alg)?);
    DiffContext::new(alg, &gens)
}

/// Basis of the scalar matrices `M_k(GF(p))` inside `M_k(GF(p)[t]/(t^p))`.
pub fn scalar_coefficients(k: usize, p: u64) -> Vec<Vec<u64>> {
    let n = k * k * p as usize;
    (0..k * k).map(|ij| unit_vector(n, ij * p as usize)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Subspace;
    use crate::models::{matrix_algebra, matrix_over_truncated};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_expr(ctx: &DiffContext, rng: &mut ChaCha8Rng) -> DiffOpExpr {
        let p = ctx.p();
        let bb = ctx.inner().b.basis_vectors();
        let elem = |rng: &mut ChaCha8Rng| {
            let mut v = vec![0u64; ctx.algebra().dim()];
            for b in &bb {
                let c = rng.gen_range(0..p);
                for (o, &x) in v.iter_mut().zip(b) {
                    *o = (*o + c * x) % p;
                }
            }
            v
        };
        let mut terms = Vec::new();
        for _ in 0..rng.gen_range(1..3) {
            let mut factors = Vec::new();
            for _ in 0..rng.gen_range(0..5) {
                factors.push(match rng.gen_range(0..3) {
                    0 => Factor::Left(elem(rng)),
                    1 => Factor::Right(elem(rng)),
                    _ if ctx.m() > 0 => Factor::Mu(rng.gen_range(0..ctx.m()), rng.gen_range(0..2 * p as u32)),
                    _ => Factor::Left(elem(rng)),
                });
            }
            terms.push(OpTerm {
                coeff: rng.gen_range(1..p),
                factors,
            });
        }
        DiffOpExpr { terms }
    }

    fn check_coherent(ctx: &DiffContext, e: &DiffOpExpr) {
        let n = ctx.algebra().dim();
        let right = ctx.normalize(e, Orientation::Right).unwrap();
        let left = ctx.normalize(e, Orientation::Left).unwrap();
        for i in 0..n {
            let x = unit_vector(n, i);
            let direct = ctx.evaluate_expr(e, &x).unwrap();
            assert_eq!(ctx.evaluate(&right, &x).unwrap(), direct);
            assert_eq!(ctx.evaluate(&left, &x).unwrap(), direct);
        }
        for nf in [&right, &left] {
            let again = ctx.normalize(&ctx.to_expr(nf), nf.orientation).unwrap();
            assert_eq!(&again, nf);
        }
    }

    #[test]
    fn truncated_context_has_one_outer_generator() {
        let ctx = truncated_context(2, 2).unwrap();
        assert_eq!(ctx.m(), 1);
        assert_eq!(ctx.b_dim(), 8);
        ctx.verify_certificates().unwrap();
        let q = ctx.quotient_presentation().unwrap();
        assert!(q.is_abelian());
        assert_eq!(q.pmap_of(0), &[0]);
    }

    #[test]
    fn mu_past_right_multiplication() {
        let ctx = truncated_context(2, 2).unwrap();
        let a = ctx.algebra().clone();
        // x -> (x^mu) a  equals  x -> (x a)^mu - x a^mu
        let lhs = DiffOpExpr::parse("m1 r(e12t + e21)", &a, 1).unwrap();
        let rhs = DiffOpExpr::parse("r(e12t + e21) m1 - r(e12)", &a, 1).unwrap();
        for o in [Orientation::Right, Orientation::Left] {
            assert_eq!(ctx.normalize(&lhs, o).unwrap(), ctx.normalize(&rhs, o).unwrap());
        }
    }

    #[test]
    fn p_power_certificate_leaves_empty_word() {
        let (alg, ddt) = matrix_over_truncated(2, 2).unwrap();
        let alg = Arc::new(alg);
        let te12 = alg.index_of("e12t").unwrap();
        let mu = Derivation::new(alg.clone(), ddt.add(&inner_matrix(&alg, &unit_vector(8, te12))).unwrap()).unwrap();
        let ctx = DiffContext::new(alg.clone(), &[mu]).unwrap();
        assert_eq!(ctx.m(), 1);
        let e = DiffOpExpr::parse("m1 m1", &alg, 1).unwrap();
        let nf = ctx.normalize(&e, Orientation::Right).unwrap();
        assert!(nf.terms[1].iter().all(|&c| c == 0));
        let b = DiffOpExpr::parse("r(e12) - l(e12)", &alg, 1).unwrap();
        let nb = ctx.normalize(&b, Orientation::Right).unwrap();
        assert!(ctx.equal_as_operators(&nf, &nb).unwrap().equal);
        check_coherent(&ctx, &e);
    }

    #[test]
    fn formal_inner_generator_evaluates_by_hand() {
        let alg = Arc::new(matrix_algebra(2, 2).unwrap());
        let e12 = Derivation::new(alg.clone(), inner_matrix(&alg, &[0, 1, 0, 0])).unwrap();
        let ctx = DiffContext::with_outer(alg.clone(), &inner_generators(&alg).unwrap(), &[e12]).unwrap();
        assert!(ctx.is_formal());
        let e = DiffOpExpr::parse("m1 l(e11)", &alg, 1).unwrap();
        for o in [Orientation::Right, Orientation::Left] {
            let nf = ctx.normalize(&e, o).unwrap();
            assert_eq!(ctx.evaluate(&nf, &[1, 0, 0, 0]).unwrap(), vec![0, 1, 0, 0]);
        }
        let audit = ctx.audit(None).unwrap();
        assert_eq!(audit.operators, 32);
        assert!(!audit.faithful);
        assert_eq!(audit.kernel_dim, 16);
        let eq = ctx.equal_as_operators(&ctx.normalize(&e, Orientation::Right).unwrap(), &ctx.normalize(&e, Orientation::Left).unwrap()).unwrap();
        assert!(eq.equal);
        assert_eq!(eq.verdict, "model-relative");
    }

    #[test]
    fn right_multiplication_applied_to_unit() {
        let ctx = truncated_context(2, 3).unwrap();
        let a = ctx.algebra().clone();
        let c = vec![0, 2, 1, 0, 0, 0, 1, 0, 0, 0, 0, 2];
        let nf = ctx.normalize(&DiffOpExpr::single(1, vec![Factor::Right(c.clone())]), Orientation::Right).unwrap();
        assert_eq!(ctx.evaluate(&nf, a.unit()).unwrap(), c);
        let zero = ctx.normalize(&DiffOpExpr::zero(), Orientation::Left).unwrap();
        assert!(zero.is_zero());
        assert_eq!(ctx.evaluate(&zero, &c).unwrap(), vec![0; 12]);
    }

    #[test]
    fn audits() {
        let alg = Arc::new(matrix_algebra(2, 2).unwrap());
        let all: Vec<Vec<u64>> = (0..4).map(|i| unit_vector(4, i)).collect();
        let plain = faithfulness_audit(&alg, &all, &[]).unwrap();
        assert_eq!(plain.operators, 16);
        assert!(plain.faithful);

        for (k, p) in [(1, 2), (1, 3), (2, 2)] {
            let ctx = truncated_context(k, p).unwrap();
            let coeffs = Subspace::span(p, ctx.algebra().dim(), &scalar_coefficients(k, p));
            let r = ctx.audit(Some(&coeffs)).unwrap();
            assert_eq!(r.operators, k.pow(4) * p as usize);
            assert!(r.faithful, "{} {}", k, p);
        }
        let single = faithfulness_audit(&alg, &[unit_vector(4, 1)], &[]).unwrap();
        assert!(single.faithful);
    }

    #[test]
    fn random_expressions_are_coherent() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (k, p) in [(1, 2), (1, 3), (2, 2)] {
            let ctx = truncated_context(k, p).unwrap();
            for _ in 0..20 {
                let e = random_expr(&ctx, &mut rng);
                check_coherent(&ctx, &e);
            }
        }
    }

    #[test]
    fn print_parse_round_trip_of_normal_forms() {
        let ctx = truncated_context(1, 3).unwrap();
        let a = ctx.algebra().clone();
        let e = DiffOpExpr::parse("l(e11t) m1^4 r(2*e11t2 + 1)", &a, 1).unwrap();
        let nf = ctx.normalize(&e, Orientation::Left).unwrap();
        let text = ctx.to_expr(&nf).to_text(&a);
        let back = DiffOpExpr::parse(&text, &a, 1).unwrap();
        assert_eq!(ctx.normalize(&back, Orientation::Left).unwrap(), nf);
    }
}
