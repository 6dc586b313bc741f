use rand::Rng;
use serde::Serialize;

use crate::config::SearchConfig;
use crate::error::{Error, Result};
use crate::linalg::{for_each_projective_point, FpMatrix, Subspace};

use super::presentation::{unit_vector, AlgebraPresentation};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SemiprimeVerdict {
    pub semiprime: bool,
    /// Nonzero `x` with `x B x = 0` when not semiprime.
    pub witness: Option<Vec<u64>>,
    /// Dimension of the trace-form kernel that was searched.
    pub searched_dim: usize,
}

impl AlgebraPresentation {
    /// `x e_a x = 0` for every basis element `e_a`.
    pub fn kills_sandwich(&self, x: &[u64]) -> bool {
        let n = self.dim();
        (0..n).all(|a| {
            let xa = self.mul_coords(x, &unit_vector(n, a));
            self.mul_coords(&xa, x).iter().all(|&c| c == 0)
        })
    }

    /// Gram matrix of the trace form `(x, y) -> tr(L_{xy})`.
    pub fn trace_form_matrix(&self) -> FpMatrix {
        let n = self.dim();
        let p = self.p();
        let traces: Vec<u64> = (0..n)
            .map(|k| {
                let m = self.left_mult_matrix(&unit_vector(n, k));
                (0..n).fold(0, |acc, i| (acc + m.get(i, i)) % p)
            })
            .collect();
        let mut g = FpMatrix::zeros(p, n, n);
        for i in 0..n {
            for j in 0..n {
                let mut t = 0;
                self.for_each_term(i, j, |k, c| t = (t + c * traces[k]) % p);
                g.set(i, j, t);
            }
        }
        g
    }

    /// Radical of the trace form; contains every nilpotent ideal.
    pub fn trace_kernel(&self) -> Subspace {
        let g = self.trace_form_matrix();
        let k = g.kernel();
        if k.rows() == 0 {
            self.zero_space()
        } else {
            Subspace::row_space(&k)
        }
    }

    /// Semiprime iff no nonzero `x` has `x B x = 0`.
    ///
    /// Such an `x` generates a nilpotent ideal and so lies in the trace-form
    /// kernel; the search runs there, exhaustively when within budget and by
    /// seeded sampling otherwise.
    pub fn is_semiprime(&self, config: &SearchConfig) -> Result<SemiprimeVerdict> {
        let t = self.trace_kernel();
        let d = t.dim();
        let p = self.p();
        if d == 0 {
            return Ok(SemiprimeVerdict {
                semiprime: true,
                witness: None,
                searched_dim: 0,
            });
        }
        let mut witness = None;
        if config.fits(p, d) {
            for_each_projective_point(p, d, |c| {
                let x = t.combine(c);
                if self.kills_sandwich(&x) {
                    witness = Some(x);
                    false
                } else {
                    true
                }
            });
            return Ok(SemiprimeVerdict {
                semiprime: witness.is_none(),
                witness,
                searched_dim: d,
            });
        }
        for i in 0..d {
            let x = t.basis_vector(i).to_vec();
            if self.kills_sandwich(&x) {
                witness = Some(x);
                break;
            }
        }
        let mut rng = config.rng(0x5e41);
        for _ in 0..config.samples {
            if witness.is_some() {
                break;
            }
            let c: Vec<u64> = (0..d).map(|_| rng.gen_range(0..p)).collect();
            let x = t.combine(&c);
            if x.iter().any(|&v| v != 0) && self.kills_sandwich(&x) {
                witness = Some(x);
            }
        }
        match witness {
            Some(x) => Ok(SemiprimeVerdict {
                semiprime: false,
                witness: Some(x),
                searched_dim: d,
            }),
            None => Err(Error::Undecided(format!(
                "semiprimeness: trace kernel of dimension {} exceeds the search budget",
                d
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::algebra::direct_sum;
    use crate::config::SearchConfig;
    use crate::models::{matrix_algebra, truncated_poly_deg, upper_triangular};

    #[test]
    fn standard_verdicts() {
        let cfg = SearchConfig::default();
        assert!(matrix_algebra(2, 2).unwrap().is_semiprime(&cfg).unwrap().semiprime);
        let v = truncated_poly_deg(2, 2).unwrap().is_semiprime(&cfg).unwrap();
        assert_eq!(v.witness, Some(vec![0, 1]));
        let v = upper_triangular(2, 2).unwrap().is_semiprime(&cfg).unwrap();
        assert_eq!(v.witness, Some(vec![0, 1, 0]));
    }

    #[test]
    fn direct_sums_combine_verdicts() {
        let cfg = SearchConfig::default();
        let m = matrix_algebra(2, 2).unwrap();
        let t = truncated_poly_deg(2, 2).unwrap();
        let f = truncated_poly_deg(2, 1).unwrap();
        assert!(direct_sum(&m, &f).unwrap().algebra.is_semiprime(&cfg).unwrap().semiprime);
        assert!(!direct_sum(&m, &t).unwrap().algebra.is_semiprime(&cfg).unwrap().semiprime);
    }

    #[test]
    fn over_budget_without_witness_is_undecided() {
        let cfg = SearchConfig::default().with_budget(1);
        let m = matrix_algebra(2, 2).unwrap();
        assert!(m.is_semiprime(&cfg).unwrap_err().is_undecided());
        let t = upper_triangular(2, 2).unwrap();
        assert!(!t.is_semiprime(&cfg).unwrap().semiprime);
    }
}
