//! Named desk models: plain algebras for the quasi-Frobenius sweep and
//! scenarios pairing a model with a derivation list and a designated inner part.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::{direct_sum, unit_vector, AlgebraPresentation};
use crate::derivation::{inner_matrix, Derivation};
use crate::diffop::DiffContext;
use crate::error::{Error, Result};
use crate::format::{AlgebraFile, DerivationAction, DerivationSpec, Expected, ScenarioSpec};
use crate::linalg::Subspace;
use crate::models::{
    cyclic_group_algebra, matrix_algebra, matrix_over_truncated, truncated_poly, upper_triangular,
};

/// A model algebra `R`, derivations generating `L`, the expected inner part
/// `B(L)` and expected findings.
#[derive(Clone, Debug)]
pub struct ModelScenario {
    pub name: String,
    pub algebra: Arc<AlgebraPresentation>,
    pub derivations: Vec<(String, Derivation)>,
    pub inner: Option<Subspace>,
    pub expected: BTreeMap<String, Expected>,
}

impl ModelScenario {
    /// Builds the differential context and checks the designated inner part.
    pub fn context(&self) -> Result<DiffContext> {
        let gens: Vec<Derivation> = self.derivations.iter().map(|(_, d)| d.clone()).collect();
        let ctx = DiffContext::new(self.algebra.clone(), &gens)?;
        if let Some(b) = &self.inner {
            if b != &ctx.inner().b {
                return Err(Error::invalid(format!(
                    "scenario {}: designated inner part has dimension {}, computed B(L) has dimension {}",
                    self.name,
                    b.dim(),
                    ctx.inner().b.dim()
                )));
            }
        }
        Ok(ctx)
    }

    pub fn expected_bool(&self, key: &str) -> Option<bool> {
        match self.expected.get(key) {
            Some(Expected::Bool(b)) => Some(*b),
            _ => None,
        }
    }

    pub fn expected_int(&self, key: &str) -> Option<i64> {
        match self.expected.get(key) {
            Some(Expected::Int(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn to_file(&self) -> AlgebraFile {
        let mut file = AlgebraFile::from_algebra(self.algebra.as_ref().clone());
        file.derivations = self
            .derivations
            .iter()
            .map(|(name, d)| DerivationSpec {
                name: name.clone(),
                action: DerivationAction::Matrix(d.matrix().clone()),
            })
            .collect();
        file.scenario = Some(ScenarioSpec {
            name: self.name.clone(),
            inner: self.inner.as_ref().map(|s| s.basis_vectors()).unwrap_or_default(),
            expected: self.expected.clone(),
        });
        file
    }

    pub fn from_file(file: &AlgebraFile) -> Result<Self> {
        let alg = Arc::new(file.require_algebra()?.clone());
        let spec = file
            .scenario
            .as_ref()
            .ok_or_else(|| Error::invalid("file has no scenario section"))?;
        let derivations = derivations_of(&alg, &file.derivations)?;
        let inner = (!spec.inner.is_empty()).then(|| Subspace::span(alg.p(), alg.dim(), &spec.inner));
        Ok(ModelScenario {
            name: spec.name.clone(),
            algebra: alg,
            derivations,
            inner,
            expected: spec.expected.clone(),
        })
    }
}

/// Checked derivations from file specs.
pub fn derivations_of(alg: &Arc<AlgebraPresentation>, specs: &[DerivationSpec]) -> Result<Vec<(String, Derivation)>> {
    specs
        .iter()
        .map(|s| {
            let m = match &s.action {
                DerivationAction::Matrix(m) => m.clone(),
                DerivationAction::Inner(a) => {
                    if a.len() != alg.dim() {
                        return Err(Error::ShapeMismatch(format!(
                            "derivation {}: inner element has {} coordinates, algebra has {}",
                            s.name,
                            a.len(),
                            alg.dim()
                        )));
                    }
                    inner_matrix(alg, a)
                }
            };
            Ok((s.name.clone(), Derivation::new(alg.clone(), m)?))
        })
        .collect()
}

fn expect(pairs: &[(&str, Expected)]) -> BTreeMap<String, Expected> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn inner_of(alg: &Arc<AlgebraPresentation>, elems: &[Vec<u64>]) -> Result<Vec<(String, Derivation)>> {
    elems
        .iter()
        .map(|a| Ok((format!("ad({})", alg.format_coords(a)), Derivation::new(alg.clone(), inner_matrix(alg, a))?)))
        .collect()
}

fn matrix_unit(k: usize, i: usize, j: usize) -> Vec<u64> {
    unit_vector(k * k, i * k + j)
}

fn add(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn scenario(
    name: &str,
    alg: Arc<AlgebraPresentation>,
    derivations: Vec<(String, Derivation)>,
    inner: Vec<Vec<u64>>,
    expected: BTreeMap<String, Expected>,
) -> ModelScenario {
    let inner = Subspace::span(alg.p(), alg.dim(), &inner);
    ModelScenario {
        name: name.to_string(),
        algebra: alg,
        derivations,
        inner: Some(inner),
        expected,
    }
}

/// `M_2(GF(2))` with all inner derivations.
pub fn m2_inner() -> Result<ModelScenario> {
    let alg = Arc::new(matrix_algebra(2, 2)?);
    let all: Vec<Vec<u64>> = (0..4).map(|i| unit_vector(4, i)).collect();
    Ok(scenario(
        "m2_inner_gf2",
        alg.clone(),
        inner_of(&alg, &all)?,
        all,
        expect(&[
            ("constants_dim", Expected::Int(1)),
            ("constants_semiprime", Expected::Bool(true)),
            ("diff_semisimple", Expected::Bool(true)),
        ]),
    ))
}

/// `B = {diag(A, A)}` inside `M_4(GF(2))` with `L = B^-`.
pub fn m2_block_in_m4() -> Result<ModelScenario> {
    let alg = Arc::new(matrix_algebra(4, 2)?);
    let b: Vec<Vec<u64>> = (0..4)
        .map(|ij| {
            let (i, j) = (ij / 2, ij % 2);
            add(&matrix_unit(4, i, j), &matrix_unit(4, i + 2, j + 2))
        })
        .collect();
    Ok(scenario(
        "m2_block_in_m4_gf2",
        alg.clone(),
        inner_of(&alg, &b)?,
        b,
        expect(&[
            ("constants_dim", Expected::Int(4)),
            ("constants_semiprime", Expected::Bool(true)),
            ("diff_semisimple", Expected::Bool(true)),
        ]),
    ))
}

/// `B = span{1, e12}` inside `M_2(GF(2))` with `L = span{e12^-}`.
pub fn unipotent_in_m2() -> Result<ModelScenario> {
    let alg = Arc::new(matrix_algebra(2, 2)?);
    let e12 = matrix_unit(2, 0, 1);
    Ok(scenario(
        "unipotent_in_m2_gf2",
        alg.clone(),
        inner_of(&alg, &[e12.clone()])?,
        vec![alg.unit().to_vec(), e12],
        expect(&[
            ("constants_dim", Expected::Int(2)),
            ("constants_semiprime", Expected::Bool(false)),
            ("diff_semisimple", Expected::Bool(false)),
        ]),
    ))
}

/// `B = M_2 (+) GF(2)` block-diagonal in `M_3(GF(2))` with `L = B^-`.
pub fn m2_plus_gf2_in_m3() -> Result<ModelScenario> {
    let alg = Arc::new(matrix_algebra(3, 2)?);
    let mut b: Vec<Vec<u64>> = (0..4).map(|ij| matrix_unit(3, ij / 2, ij % 2)).collect();
    b.push(matrix_unit(3, 2, 2));
    Ok(scenario(
        "m2_plus_gf2_in_m3_gf2",
        alg.clone(),
        inner_of(&alg, &b)?,
        b,
        expect(&[
            ("constants_dim", Expected::Int(2)),
            ("constants_semiprime", Expected::Bool(true)),
            ("diff_semisimple", Expected::Bool(true)),
        ]),
    ))
}

/// `M_k(GF(p)[t]/(t^p))` with all inner derivations and `d/dt`.
pub fn truncated(k: usize, p: u64) -> Result<ModelScenario> {
    let (alg, ddt) = matrix_over_truncated(k, p)?;
    let alg = Arc::new(alg);
    let n = alg.dim();
    let all: Vec<Vec<u64>> = (0..n).map(|i| unit_vector(n, i)).collect();
    let mut derivations = vec![("d/dt".to_string(), Derivation::new(alg.clone(), ddt)?)];
    if k > 1 {
        derivations.extend(inner_of(&alg, &all)?);
    }
    Ok(scenario(
        &format!("m{}_truncated_gf{}", k, p),
        alg,
        derivations,
        all,
        expect(&[
            ("constants_dim", Expected::Int(1)),
            ("constants_semiprime", Expected::Bool(true)),
            ("diff_semisimple", Expected::Bool(true)),
            ("outer", Expected::Int(1)),
        ]),
    ))
}

/// `M_2(GF(2)[t]/(t^2))` with the single derivation `d/dt + (t e12)^-`,
/// whose square is the inner derivation `e12^-`.
pub fn twisted_truncated() -> Result<ModelScenario> {
    let (alg, ddt) = matrix_over_truncated(2, 2)?;
    let alg = Arc::new(alg);
    let te12 = unit_vector(8, alg.index_of("e12t").expect("name"));
    let e12 = unit_vector(8, alg.index_of("e12").expect("name"));
    let t = unit_vector(8, alg.index_of("e11t").expect("name"));
    let t = add(&t, &unit_vector(8, alg.index_of("e22t").expect("name")));
    let mu = Derivation::new(alg.clone(), ddt.add(&inner_matrix(&alg, &te12))?)?;
    Ok(scenario(
        "twisted_truncated_gf2",
        alg.clone(),
        vec![("d/dt + ad(e12t)".to_string(), mu)],
        vec![alg.unit().to_vec(), t, e12, te12],
        expect(&[("outer", Expected::Int(1))]),
    ))
}

pub fn scenarios() -> Result<Vec<ModelScenario>> {
    Ok(vec![
        m2_inner()?,
        m2_block_in_m4()?,
        unipotent_in_m2()?,
        m2_plus_gf2_in_m3()?,
        truncated(1, 2)?,
        truncated(1, 3)?,
        truncated(2, 2)?,
        truncated(2, 3)?,
        twisted_truncated()?,
    ])
}

/// A named algebra with expected structural flags.
#[derive(Clone, Debug)]
pub struct CorpusAlgebra {
    pub name: String,
    pub algebra: AlgebraPresentation,
    pub expected: BTreeMap<String, Expected>,
}

impl CorpusAlgebra {
    pub fn to_file(&self) -> AlgebraFile {
        let mut file = AlgebraFile::from_algebra(self.algebra.clone());
        file.scenario = Some(ScenarioSpec {
            name: self.name.clone(),
            inner: Vec::new(),
            expected: self.expected.clone(),
        });
        file
    }
}

fn entry(name: String, algebra: AlgebraPresentation, semisimple: bool, frobenius: bool) -> CorpusAlgebra {
    CorpusAlgebra {
        name,
        algebra,
        expected: expect(&[
            ("semisimple", Expected::Bool(semisimple)),
            ("frobenius", Expected::Bool(frobenius)),
            ("qf", Expected::Bool(frobenius)),
        ]),
    }
}

/// The quasi-Frobenius sweep: `M_k(GF(p))` for `k <= 3`, `p` in `{2, 3}`;
/// `T_2(GF(2))`; `GF(p)[t]/(t^p)` for `p` in `{2, 3, 5}`; `GF(2)[C_2]`;
/// `GF(3)[C_3]`; `M_2(GF(2)) (+) GF(2)`.
pub fn qf_corpus() -> Result<Vec<CorpusAlgebra>> {
    let mut out = Vec::new();
    for p in [2, 3] {
        for k in 1..=3 {
            out.push(entry(format!("m{}_gf{}", k, p), matrix_algebra(k, p)?, true, true));
        }
    }
    out.push(entry("t2_gf2".into(), upper_triangular(2, 2)?, false, false));
    for p in [2, 3, 5] {
        out.push(entry(format!("trunc_gf{}", p), truncated_poly(p)?, false, true));
    }
    out.push(entry("c2_gf2".into(), cyclic_group_algebra(2, 2)?, false, true));
    out.push(entry("c3_gf3".into(), cyclic_group_algebra(3, 3)?, false, true));
    let sum = direct_sum(&matrix_algebra(2, 2)?, &matrix_algebra(1, 2)?)?;
    out.push(entry("m2_plus_gf2".into(), sum.algebra, true, true));
    Ok(out)
}
