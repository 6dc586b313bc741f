//! Per-model records shared by the command line and the acceptance suite.
//! Every record embeds the search configuration that produced it.

use std::sync::Arc;

use serde::Serialize;

use crate::algebra::AlgebraPresentation;
use crate::config::SearchConfig;
use crate::corpus::{CorpusAlgebra, ModelScenario};
use crate::derivation::{constants, diff_semisimple, DiffSemisimpleVerdict};
use crate::diffop::{inner_generators, DiffContext};
use crate::error::{Error, Result};
use crate::frobenius::{frobenius_check, power_vanishing_table, qf_report, FrobeniusReport, QfAnalysis, QfReport};
use crate::gpi::{
    build_gpi, central_mixer, constants_operator, holds_on, is_formally_trivial, min_standard_degree,
    triviality_vs_br, MultilinearPoly,
};

/// Naming conventions a reader needs to interpret the numbers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Conventions {
    pub composition: &'static str,
    pub standard_identity: &'static str,
    pub triviality: &'static str,
}

pub const CONVENTIONS: Conventions = Conventions {
    composition: "left-to-right; x^(a^r) = xa, x^(a^l) = ax",
    standard_identity: "S_d has d indeterminates",
    triviality: "tensor-criterion",
};

#[derive(Clone, Debug, Serialize)]
pub struct Envelope<T: Serialize> {
    pub command: String,
    pub config: SearchConfig,
    pub conventions: Conventions,
    pub body: T,
}

impl<T: Serialize> Envelope<T> {
    pub fn new(command: &str, config: SearchConfig, body: T) -> Self {
        Envelope {
            command: command.to_string(),
            config,
            conventions: CONVENTIONS,
            body,
        }
    }
}

/// One cross-check: a named implication or equality and whether it held.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BrCheck {
    pub n: usize,
    pub br_power_zero: bool,
    pub nontrivial_found: bool,
    pub consistent: bool,
    pub exact: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AlgebraRecord {
    pub name: String,
    pub p: u64,
    pub dim: usize,
    pub semisimple: bool,
    pub qf: QfReport,
    pub frobenius: FrobeniusReport,
    /// Whether `B_r^k B_l^(n-k) = 0` is independent of `k`, for `n = 1..=3`.
    pub power_tables_equal: Vec<bool>,
    pub br_checks: Vec<BrCheck>,
    /// Conjugate pairs of the whole algebra whose mixer passed its checks.
    pub mixers_checked: usize,
    pub min_standard_degree: Option<usize>,
    pub checks: Vec<Check>,
    pub exact: bool,
}

impl AlgebraRecord {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub const STANDARD_DMAX: usize = 6;

/// QF predicates, Frobenius verdict and the cross-checks that tie them to
/// semisimplicity, `B_r`, `B_l` and the central mixers.
pub fn algebra_record(name: &str, alg: &AlgebraPresentation, config: &SearchConfig) -> Result<AlgebraRecord> {
    let semisimple = alg.is_semiprime(config)?;
    let qa = QfAnalysis::compute(alg, config)?;
    let qf = qf_report(alg, &qa)?;
    let frobenius = frobenius_check(alg, config)?;
    let mut checks = Vec::new();
    checks.push(Check::new(
        "frobenius implies q1, q4, q5",
        !frobenius.f3 || (qf.q1 && qf.q4 && qf.q5),
        format!("f3={} q1={} q4={} q5={}", frobenius.f3, qf.q1, qf.q4, qf.q5),
    ));
    checks.push(Check::new(
        "semisimple implies frobenius",
        !semisimple.semiprime || frobenius.f3,
        format!("semisimple={} f3={}", semisimple.semiprime, frobenius.f3),
    ));
    let mut power_tables_equal = Vec::new();
    for n in 1..=3 {
        let t = power_vanishing_table(alg, &qa.br, &qa.bl, n)?;
        power_tables_equal.push(t.all_equal);
    }
    checks.push(Check::new(
        "power vanishing tables constant",
        power_tables_equal.iter().all(|&b| b),
        format!("{:?}", power_tables_equal),
    ));
    let mut br_checks = Vec::new();
    for n in 1..=3 {
        let f = MultilinearPoly::monomial(alg.p(), n)?;
        match triviality_vs_br(alg, &qa, &f, config) {
            Ok(r) => br_checks.push(BrCheck {
                n,
                br_power_zero: r.br_power_zero,
                nontrivial_found: r.nontrivial_found,
                consistent: r.consistent,
                exact: r.exact,
            }),
            Err(e) if e.is_undecided() => break,
            Err(e) => return Err(e),
        }
    }
    checks.push(Check::new(
        "triviality agrees with B_r powers",
        br_checks.iter().all(|c| c.consistent),
        format!("{} arities checked", br_checks.len()),
    ));
    let alg = Arc::new(alg.clone());
    let ctx = DiffContext::new(alg.clone(), &inner_generators(&alg)?)?;
    let mixers_checked = mixer_sweep(&ctx, config)?;
    let degree = min_standard_degree(&alg, STANDARD_DMAX.min(alg.dim() + 1))?.degree;
    Ok(AlgebraRecord {
        name: name.to_string(),
        p: alg.p(),
        dim: alg.dim(),
        semisimple: semisimple.semiprime,
        qf,
        frobenius,
        power_tables_equal,
        br_checks,
        mixers_checked,
        min_standard_degree: degree,
        checks,
        exact: qa.exact,
    })
}

/// Runs the central mixer checks for every conjugate pair of `B(L)`.
pub fn mixer_sweep(ctx: &DiffContext, config: &SearchConfig) -> Result<usize> {
    let b = &ctx.inner().b_alg;
    let qa = QfAnalysis::compute(b, config)?;
    let mut count = 0;
    for pair in qa.right_pairs.iter().chain(&qa.left_pairs) {
        central_mixer(ctx, pair)?;
        count += 1;
    }
    Ok(count)
}

#[derive(Clone, Debug, Serialize)]
pub struct OperatorRecord {
    pub rho_dim: usize,
    pub constants_dim: usize,
    pub image_dim: usize,
    pub nonzero: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineRecord {
    pub polynomial: String,
    pub family_size: usize,
    pub all_hold: bool,
    pub nontrivial: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioRecord {
    pub name: String,
    pub p: u64,
    pub model_dim: usize,
    pub lie_dim: usize,
    pub k_dim: usize,
    pub b_dim: usize,
    pub outer: usize,
    pub constants_dim: usize,
    pub constants_semiprime: bool,
    pub diff_semisimple: DiffSemisimpleVerdict,
    pub b_qf: QfReport,
    pub mixers_checked: usize,
    pub operators: Vec<OperatorRecord>,
    pub pipeline: Option<PipelineRecord>,
    pub checks: Vec<Check>,
}

impl ScenarioRecord {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Largest family of slot tuples the identity pipeline sweeps.
const PIPELINE_LIMIT: usize = 64;

pub fn scenario_record(s: &ModelScenario, config: &SearchConfig) -> Result<ScenarioRecord> {
    let ctx = s.context()?;
    let alg = ctx.algebra().clone();
    let inner = ctx.inner();
    let consts = constants(ctx.lie(), &alg.full_space())?;
    let consts_alg = alg.subalgebra_presentation(&consts)?;
    let semiprime = consts_alg.is_semiprime(config)?.semiprime;
    let ds = diff_semisimple(inner, config)?;
    let qa = QfAnalysis::compute(&inner.b_alg, config)?;
    let b_qf = qf_report(&inner.b_alg, &qa)?;
    let mut checks = vec![Check::new(
        "constants semiprime iff B(L) differentially semisimple",
        semiprime == ds.semisimple,
        format!("semiprime={} diff_semisimple={}", semiprime, ds.semisimple),
    )];
    let mut mixers_checked = 0;
    for pair in qa.right_pairs.iter().chain(&qa.left_pairs) {
        central_mixer(&ctx, pair)?;
        mixers_checked += 1;
    }
    let mut operators = Vec::new();
    if !ctx.is_formal() {
        for pair in &qa.right_pairs {
            let u = constants_operator(&ctx, pair)?;
            operators.push(OperatorRecord {
                rho_dim: pair.dim(),
                constants_dim: u.constants_dim,
                image_dim: u.image_dim,
                nonzero: u.nonzero,
            });
        }
    }
    let pipeline = if ctx.m() == 0 && consts_alg.is_commutative() && !qa.right_pairs.is_empty() {
        let f = MultilinearPoly::commutator(alg.p())?;
        let r = identity_pipeline(&ctx, &qa, &f)?;
        checks.push(Check::new(
            "identities from a PI of the constants hold on the model",
            r.all_hold,
            format!("{} of {} formally nontrivial", r.nontrivial, r.family_size),
        ));
        Some(r)
    } else {
        None
    };
    for (key, got) in [
        ("constants_semiprime", Some(semiprime)),
        ("diff_semisimple", Some(ds.semisimple)),
    ] {
        if let (Some(want), Some(got)) = (s.expected_bool(key), got) {
            checks.push(Check::new(&format!("expected {}", key), want == got, format!("{}", got)));
        }
    }
    for (key, got) in [("constants_dim", consts.dim()), ("outer", ctx.m())] {
        if let Some(want) = s.expected_int(key) {
            checks.push(Check::new(&format!("expected {}", key), want == got as i64, format!("{}", got)));
        }
    }
    Ok(ScenarioRecord {
        name: s.name.clone(),
        p: alg.p(),
        model_dim: alg.dim(),
        lie_dim: ctx.lie().dim(),
        k_dim: inner.k.dim(),
        b_dim: inner.dim(),
        outer: ctx.m(),
        constants_dim: consts.dim(),
        constants_semiprime: semiprime,
        diff_semisimple: ds,
        b_qf,
        mixers_checked,
        operators,
        pipeline,
        checks,
    })
}

/// Builds `f(c_1(x_1), ..., c_n(x_n))` for tuples of right conjugate pairs of
/// `B(L)`, pushed into the model, and checks each on the model. All tuples
/// are used when there are at most [`PIPELINE_LIMIT`], else the diagonal ones.
pub fn identity_pipeline(ctx: &DiffContext, qa: &QfAnalysis, f: &MultilinearPoly) -> Result<PipelineRecord> {
    let pairs = &qa.right_pairs;
    if pairs.is_empty() {
        return Err(Error::invalid("B(L) has no conjugate pairs"));
    }
    let n = f.arity();
    let total = pairs.len().checked_pow(n as u32).unwrap_or(usize::MAX);
    let tuples: Vec<Vec<usize>> = if total <= PIPELINE_LIMIT {
        (0..total)
            .map(|mut t| {
                let mut idx = vec![0; n];
                for slot in idx.iter_mut().rev() {
                    *slot = t % pairs.len();
                    t /= pairs.len();
                }
                idx
            })
            .collect()
    } else {
        (0..pairs.len()).map(|i| vec![i; n]).collect()
    };
    let alg = ctx.algebra();
    let mut all_hold = true;
    let mut nontrivial = 0;
    for idx in &tuples {
        let chosen: Vec<_> = idx.iter().map(|&i| &pairs[i]).collect();
        let gp = build_gpi(f, &chosen)?.embed(ctx.inner())?;
        all_hold &= holds_on(&gp, alg)?.holds;
        if !is_formally_trivial(&gp, alg)?.trivial {
            nontrivial += 1;
        }
    }
    Ok(PipelineRecord {
        polynomial: f.to_text(),
        family_size: tuples.len(),
        all_hold,
        nontrivial,
    })
}

pub fn corpus_records(corpus: &[CorpusAlgebra], config: &SearchConfig) -> Result<Vec<AlgebraRecord>> {
    corpus
        .iter()
        .map(|c| algebra_record(&c.name, &c.algebra, config))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn m2_plus_gf2_record() {
        let a = crate::corpus::qf_corpus()
            .unwrap()
            .into_iter()
            .find(|c| c.name == "m2_plus_gf2")
            .unwrap();
        let r = algebra_record(&a.name, &a.algebra, &SearchConfig::default()).unwrap();
        assert!(r.passed(), "{:?}", r.checks);
        assert!(r.semisimple && r.frobenius.f3 && r.qf.q1);
        assert_eq!(r.min_standard_degree, Some(4));
    }

    #[test]
    fn scenario_records_meet_expectations() {
        for s in corpus::scenarios().unwrap() {
            let r = scenario_record(&s, &SearchConfig::default()).unwrap();
            assert!(r.passed(), "{}: {:?}", s.name, r.checks);
        }
    }
}
