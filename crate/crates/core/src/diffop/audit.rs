use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{unit_vector, AlgebraPresentation};
use crate::derivation::Derivation;
use crate::envelope::CorrectWord;
use crate::error::{Error, Result};
use crate::linalg::{FpMatrix, Subspace};

use super::context::DiffContext;
use super::normal::NormalForm;

/// Largest number of kernel vectors copied into a report.
const KERNEL_SAMPLE: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub model_dim: usize,
    pub coefficient_dim: usize,
    pub words: usize,
    pub operators: usize,
    pub rank: usize,
    pub faithful: bool,
    pub kernel_dim: usize,
    /// Dependencies among the operators, indexed like `labels`.
    pub kernel: Vec<Vec<u64>>,
    pub labels: Vec<String>,
}

/// Joint linear independence of `r(a) l(b) w` (that is `x -> (b x a)^w`) over
/// `a, b` in the coefficient basis and correct words `w` in `generators`.
pub fn faithfulness_audit(
    alg: &Arc<AlgebraPresentation>,
    coefficients: &[Vec<u64>],
    generators: &[Derivation],
) -> Result<AuditReport> {
    let n = alg.dim();
    let p = alg.p();
    for c in coefficients {
        if c.len() != n {
            return Err(Error::ShapeMismatch(format!("coefficient with {} coordinates, model has {}", c.len(), n)));
        }
    }
    for g in generators {
        if g.algebra().as_ref() != alg.as_ref() {
            return Err(Error::ParentMismatch);
        }
    }
    let words = CorrectWord::all(p, generators.len());
    let count = coefficients.len() * coefficients.len() * words.len();
    if count.saturating_mul(n * n) > 1 << 24 {
        return Err(Error::invalid("audit too large"));
    }
    let mut rows = Vec::with_capacity(count);
    let mut labels = Vec::with_capacity(count);
    for a in coefficients {
        for b in coefficients {
            for w in &words {
                let mut flat = Vec::with_capacity(n * n);
                for i in 0..n {
                    let x = unit_vector(n, i);
                    let mut y = alg.mul_coords(&alg.mul_coords(b, &x), a);
                    for l in w.letters() {
                        y = generators[l as usize].apply(&y);
                    }
                    flat.extend(y);
                }
                rows.push(flat);
                labels.push(format!("r({}) l({}) {}", alg.format_coords(a), alg.format_coords(b), w.name()));
            }
        }
    }
    let m = FpMatrix::from_row_vectors(p, n * n, &rows);
    let rank = m.rank();
    let kernel = m.left_kernel().row_vectors();
    let kernel_dim = kernel.len();
    Ok(AuditReport {
        model_dim: n,
        coefficient_dim: coefficients.len(),
        words: words.len(),
        operators: count,
        rank,
        faithful: kernel_dim == 0,
        kernel_dim,
        kernel: kernel.into_iter().take(KERNEL_SAMPLE).collect(),
        labels,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OperatorEquality {
    pub equal: bool,
    /// `"faithful"` when the model passed the audit on all of `B(L)`, so
    /// equality of actions means equality in the operator ring; otherwise
    /// `"model-relative"`.
    pub verdict: &'static str,
}

impl DiffContext {
    /// Audit with the coefficients restricted to `coefficients` (a subspace of
    /// model coordinates inside `B(L)`), or all of `B(L)` when `None`.
    pub fn audit(&self, coefficients: Option<&Subspace>) -> Result<AuditReport> {
        match coefficients {
            None => {
                if let Some(r) = self.audit.get() {
                    return Ok(r.clone());
                }
                let r = faithfulness_audit(&self.alg, &self.inner.b.basis_vectors(), &self.mus)?;
                Ok(self.audit.get_or_init(|| r).clone())
            }
            Some(s) => {
                if !s.is_subspace_of(&self.inner.b)? {
                    return Err(Error::invalid("coefficient subspace is not inside B(L)"));
                }
                faithfulness_audit(&self.alg, &s.basis_vectors(), &self.mus)
            }
        }
    }

    /// Compare two normal forms by their actions on the model basis.
    pub fn equal_as_operators(&self, a: &NormalForm, b: &NormalForm) -> Result<OperatorEquality> {
        let n = self.alg.dim();
        let mut equal = true;
        for i in 0..n {
            let x = unit_vector(n, i);
            if self.evaluate(a, &x)? != self.evaluate(b, &x)? {
                equal = false;
                break;
            }
        }
        let faithful = !self.is_formal() && self.audit.get().is_some_and(|r| r.faithful);
        Ok(OperatorEquality {
            equal,
            verdict: if faithful { "faithful" } else { "model-relative" },
        })
    }
}
