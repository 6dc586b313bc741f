use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use constalg::algebra::{unit_vector, AlgebraPresentation};
use constalg::config::SearchConfig;
use constalg::corpus::{self, ModelScenario};
use constalg::diffop::{
    faithfulness_audit, inner_generators, scalar_coefficients, truncated_context, DiffContext, DiffOpExpr, Factor,
    OpTerm, Orientation,
};
use constalg::envelope::{build_envelope, top_annihilator_element, verify_frobenius_kernel, RestrictedLiePresentation};
use constalg::frobenius::{frobenius_check, qf_check, power_vanishing_table, QfAnalysis};
use constalg::gpi::{
    constants_operator, min_standard_degree, standard_identity_check, triviality_vs_br, MultilinearPoly,
};
use constalg::linalg::Subspace;
use constalg::models::{matrix_algebra, upper_triangular};
use constalg::report::{algebra_record, identity_pipeline, mixer_sweep, scenario_record};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err(format!($($arg)+));
        }
    };
}

fn cfg() -> SearchConfig {
    SearchConfig::default()
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn qf_equivalence() -> Outcome {
    let algebras = corpus::qf_corpus().map_err(err)?;
    for c in &algebras {
        let r = algebra_record(&c.name, &c.algebra, &cfg()).map_err(err)?;
        for check in r.checks.iter().take(2) {
            ensure!(check.passed, "{}: {} ({})", c.name, check.name, check.detail);
        }
        ensure!(r.exact, "{}: verdict was sampled", c.name);
    }
    let t2 = upper_triangular(2, 2).map_err(err)?;
    let q = qf_check(&t2, &cfg()).map_err(err)?;
    ensure!(!q.q1, "T_2 passed q1");
    let w = q.q1_witness.ok_or("no witness")?;
    ensure!(w.ideal == vec![vec![0, 1, 0]], "witness {:?}", w.ideal);
    Ok(format!("{} algebras, T_2 witness span{{e12}}", algebras.len()))
}

fn envelopes() -> Outcome {
    let mut cases = Vec::new();
    for p in [2, 3] {
        for m in 1..=2 {
            cases.push((format!("abelian m={} p={}", m, p), RestrictedLiePresentation::abelian(p, m, None), true));
        }
    }
    cases.push((
        "toral p=3".into(),
        RestrictedLiePresentation::abelian(3, 1, Some(vec![vec![1]])),
        false,
    ));
    for p in [2, 3] {
        let br = vec![vec![vec![0, 0], vec![0, 1]], vec![vec![0, p - 1], vec![0, 0]]];
        cases.push((
            format!("non-abelian p={}", p),
            RestrictedLiePresentation::new(p, br, vec![vec![1, 0], vec![0, 0]]),
            false,
        ));
    }
    let count = cases.len();
    for (name, lie, zero_pmap) in cases {
        let lie = lie.map_err(|e| format!("{}: {}", name, e))?;
        let env = build_envelope(&lie).map_err(|e| format!("{}: {}", name, e))?;
        env.algebra.audit().map_err(|e| format!("{}: {}", name, e))?;
        ensure!(frobenius_check(&env.algebra, &cfg()).map_err(err)?.f3, "{}: no Frobenius form", name);
        ensure!(verify_frobenius_kernel(&env, &cfg()).map_err(err)?.holds, "{}: functional kernel", name);
        let top = top_annihilator_element(&env).map_err(|e| format!("{}: {}", name, e))?;
        ensure!(top.annihilator_dim == 1, "{}: annihilator dim {}", name, top.annihilator_dim);
        for i in 0..lie.dim() {
            let prod = env.algebra.mul_coords(&top.f, &env.generator(i));
            ensure!(prod.iter().all(|&c| c == 0), "{}: f m{} != 0", name, i + 1);
        }
        if zero_pmap {
            ensure!(top.f == unit_vector(env.dim(), env.top_index()), "{}: f is not the top word", name);
        }
    }
    Ok(format!("{} presentations", count))
}

fn random_expr(ctx: &DiffContext, rng: &mut ChaCha8Rng) -> DiffOpExpr {
    let p = ctx.p();
    let basis = ctx.inner().b.basis_vectors();
    let n = ctx.algebra().dim();
    let elem = |rng: &mut ChaCha8Rng| {
        let mut v = vec![0u64; n];
        for b in &basis {
            let c = rng.gen_range(0..p);
            for (o, &x) in v.iter_mut().zip(b) {
                *o = (*o + c * x) % p;
            }
        }
        v
    };
    let mut terms = Vec::new();
    for _ in 0..rng.gen_range(1..4) {
        let mut factors = Vec::new();
        for _ in 0..rng.gen_range(0..6) {
            factors.push(match rng.gen_range(0..3) {
                0 => Factor::Left(elem(rng)),
                1 => Factor::Right(elem(rng)),
                _ if ctx.m() > 0 => Factor::Mu(rng.gen_range(0..ctx.m()), rng.gen_range(0..2 * p as u32)),
                _ => Factor::Right(elem(rng)),
            });
        }
        terms.push(OpTerm {
            coeff: rng.gen_range(1..p),
            factors,
        });
    }
    DiffOpExpr { terms }
}

fn coherence() -> Outcome {
    let m2 = Arc::new(matrix_algebra(2, 2).map_err(err)?);
    let contexts = vec![
        ("M_2 inner", DiffContext::new(m2.clone(), &inner_generators(&m2).map_err(err)?).map_err(err)?),
        ("M_2(GF(2)[t]/t^2)", truncated_context(2, 2).map_err(err)?),
        ("M_2(GF(3)[t]/t^3)", truncated_context(2, 3).map_err(err)?),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg().seed);
    let per_context = 1000;
    for (name, ctx) in &contexts {
        let n = ctx.algebra().dim();
        for k in 0..per_context {
            let e = random_expr(ctx, &mut rng);
            let right = ctx.normalize(&e, Orientation::Right).map_err(err)?;
            let left = ctx.normalize(&e, Orientation::Left).map_err(err)?;
            for i in 0..n {
                let x = unit_vector(n, i);
                let a = ctx.evaluate(&right, &x).map_err(err)?;
                let b = ctx.evaluate(&left, &x).map_err(err)?;
                ensure!(a == b, "{}: expression {} disagrees on e{}", name, k, i);
            }
            for nf in [&right, &left] {
                let again = ctx.normalize(&ctx.to_expr(nf), nf.orientation).map_err(err)?;
                ensure!(&again == nf, "{}: expression {} not idempotent", name, k);
            }
        }
    }
    Ok(format!("{} expressions in each of {} contexts", per_context, contexts.len()))
}

fn faithfulness() -> Outcome {
    let mut parts = Vec::new();
    for (k, p) in [(1, 2), (1, 3), (2, 2)] {
        let ctx = truncated_context(k, p).map_err(err)?;
        let coeffs = Subspace::span(p, ctx.algebra().dim(), &scalar_coefficients(k, p));
        let r = ctx.audit(Some(&coeffs)).map_err(err)?;
        ensure!(r.faithful, "({}, {}): kernel of dimension {}", k, p, r.kernel_dim);
        parts.push(format!("({},{}) rank {}", k, p, r.rank));
    }
    let m2 = Arc::new(matrix_algebra(2, 2).map_err(err)?);
    let all: Vec<Vec<u64>> = (0..4).map(|i| unit_vector(4, i)).collect();
    let literal = faithfulness_audit(&m2, &all, &[]).map_err(err)?;
    ensure!(literal.faithful && literal.operators == 16, "literal M_2 model");
    let e12 = inner_generators(&m2).map_err(err)?.remove(1);
    let formal = DiffContext::with_outer(m2.clone(), &inner_generators(&m2).map_err(err)?, &[e12]).map_err(err)?;
    let negative = formal.audit(None).map_err(err)?;
    ensure!(!negative.faithful, "formal ad(e12) model reported faithful");
    ensure!(negative.kernel_dim == 16, "negative kernel {}", negative.kernel_dim);
    Ok(format!("{}; negative kernel {}", parts.join(", "), negative.kernel_dim))
}

fn constants_machinery() -> Outcome {
    let mut checked = 0;
    for c in corpus::qf_corpus().map_err(err)? {
        let alg = Arc::new(c.algebra.clone());
        let ctx = DiffContext::new(alg.clone(), &inner_generators(&alg).map_err(err)?).map_err(err)?;
        checked += mixer_sweep(&ctx, &cfg()).map_err(|e| format!("{}: {}", c.name, e))?;
    }
    for s in corpus::scenarios().map_err(err)? {
        let ctx = s.context().map_err(err)?;
        checked += mixer_sweep(&ctx, &cfg()).map_err(|e| format!("{}: {}", s.name, e))?;
    }
    let block = corpus::m2_block_in_m4().map_err(err)?;
    let ctx = block.context().map_err(err)?;
    let alg = ctx.algebra().clone();
    let n = alg.dim();
    let bs = ctx.inner().b.basis_vectors();
    let qa = QfAnalysis::compute(&ctx.inner().b_alg, &cfg()).map_err(err)?;
    let mut nonzero = false;
    for pair in &qa.right_pairs {
        let u = constants_operator(&ctx, pair).map_err(err)?;
        for i in 0..n {
            let y = ctx.evaluate(&u.operator, &unit_vector(n, i)).map_err(err)?;
            for b in &bs {
                ensure!(alg.mul_coords(b, &y) == alg.mul_coords(&y, b), "u(e{}) leaves the centralizer", i);
            }
            nonzero |= y.iter().any(|&c| c != 0);
        }
    }
    ensure!(nonzero, "every constants operator on the block scenario vanishes");
    Ok(format!("{} mixers; block operator nonzero into the centralizer", checked))
}

fn pipeline() -> Outcome {
    let s = corpus::m2_inner().map_err(err)?;
    let ctx = s.context().map_err(err)?;
    let qa = QfAnalysis::compute(&ctx.inner().b_alg, &cfg()).map_err(err)?;
    let f = MultilinearPoly::parse("x1*x2 + x2*x1", 2).map_err(err)?;
    let r = identity_pipeline(&ctx, &qa, &f).map_err(err)?;
    ensure!(r.family_size == qa.right_pairs.len().pow(2), "family {} is not every pair tuple", r.family_size);
    ensure!(r.all_hold, "an identity fails on M_2");
    ensure!(r.nontrivial > 0, "every identity is formally trivial");
    Ok(format!("{} identities hold, {} nontrivial", r.family_size, r.nontrivial))
}

fn b_of(s: &ModelScenario) -> Result<Arc<AlgebraPresentation>, String> {
    Ok(s.context().map_err(err)?.inner().b_alg.clone())
}

fn cross_checks() -> Outcome {
    let mut algebras: Vec<(String, Arc<AlgebraPresentation>)> = corpus::qf_corpus()
        .map_err(err)?
        .into_iter()
        .map(|c| (c.name, Arc::new(c.algebra)))
        .collect();
    for s in corpus::scenarios().map_err(err)? {
        algebras.push((format!("B({})", s.name), b_of(&s)?));
    }
    let mut consistent = 0;
    for (name, a) in &algebras {
        let qa = QfAnalysis::compute(a, &cfg()).map_err(err)?;
        for n in 1..=3 {
            let t = power_vanishing_table(a, &qa.br, &qa.bl, n).map_err(err)?;
            ensure!(t.all_equal, "{}: table {:?} for n = {}", name, t.entries, n);
        }
        if !qa.exact {
            continue;
        }
        for n in 1..=3 {
            let f = MultilinearPoly::monomial(a.p(), n).map_err(err)?;
            match triviality_vs_br(a, &qa, &f, &cfg()) {
                Ok(r) => {
                    ensure!(r.consistent, "{}: n = {} inconsistent", name, n);
                    consistent += 1;
                }
                Err(e) if e.is_undecided() => break,
                Err(e) => return Err(format!("{}: {}", name, e)),
            }
        }
    }
    Ok(format!("{} algebras, {} consistent triviality verdicts", algebras.len(), consistent))
}

fn biconditional() -> Outcome {
    let cases = [
        (corpus::m2_block_in_m4().map_err(err)?, true),
        (corpus::unipotent_in_m2().map_err(err)?, false),
        (corpus::m2_plus_gf2_in_m3().map_err(err)?, true),
    ];
    for (s, want) in &cases {
        let r = scenario_record(s, &cfg()).map_err(err)?;
        ensure!(r.constants_semiprime == *want, "{}: constants semiprime {}", s.name, r.constants_semiprime);
        ensure!(r.diff_semisimple.semisimple == *want, "{}: differential semisimplicity", s.name);
    }
    Ok("3 scenarios".into())
}

fn standard_identities() -> Outcome {
    let m2 = matrix_algebra(2, 2).map_err(err)?;
    let s2 = standard_identity_check(&m2, 2).map_err(err)?;
    ensure!(!s2.holds, "S_2 holds on M_2");
    ensure!(s2.witness == Some(vec!["e11".into(), "e12".into()]), "witness {:?}", s2.witness);
    ensure!(s2.value.as_deref() == Some("e12"), "value {:?}", s2.value);
    let min = min_standard_degree(&m2, 6).map_err(err)?;
    ensure!(min.degree == Some(4), "degree {:?}", min.degree);
    let mut commutative = 0;
    for c in corpus::qf_corpus().map_err(err)? {
        if c.algebra.is_commutative() {
            ensure!(standard_identity_check(&c.algebra, 2).map_err(err)?.holds, "{} fails S_2", c.name);
            commutative += 1;
        }
    }
    Ok(format!("M_2 degree 4, {} commutative models satisfy S_2", commutative))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("qf equivalence", qf_equivalence),
        ("restricted envelopes", envelopes),
        ("normal-form coherence", coherence),
        ("faithfulness audit", faithfulness),
        ("constants machinery", constants_machinery),
        ("identity pipeline", pipeline),
        ("power and triviality cross-checks", cross_checks),
        ("semiprime biconditional", biconditional),
        ("standard identities", standard_identities),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} PASS {}: {} [{:.1}s]", i + 1, name, detail, secs),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL {}: {} [{:.1}s]", i + 1, name, detail, secs);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
