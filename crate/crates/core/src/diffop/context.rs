use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::algebra::AlgebraPresentation;
use crate::derivation::{inner_matrix, inner_part, restricted_closure, DeltaLieAlgebra, Derivation, InnerPart};
use crate::envelope::{word_count, CorrectWord, RestrictedLiePresentation};
use crate::error::{Error, Result};
use crate::linalg::{scalar, FpMatrix};

use super::audit::AuditReport;
use super::normal::{Op, Orientation};

/// `D = sum c_k mu_k + b^-` with `b` in `K(L)`, `b` in `B` coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub c: Vec<u64>,
    pub b: Vec<u64>,
}

/// A model algebra with a restricted differential Lie algebra `L`, its inner
/// part, outer generators `mu_1..mu_m` forming a basis of `L` modulo `K(L)^-`,
/// and the certificates that drive normalization.
pub struct DiffContext {
    pub(crate) alg: Arc<AlgebraPresentation>,
    pub(crate) lie: DeltaLieAlgebra,
    pub(crate) inner: InnerPart,
    pub(crate) mus: Vec<Derivation>,
    pub(crate) mu_on_b: Vec<FpMatrix>,
    /// `brackets[i][j]` certifies `[mu_i, mu_j]`.
    pub(crate) brackets: Vec<Vec<Certificate>>,
    /// `powers[i]` certifies `mu_i^p`.
    pub(crate) powers: Vec<Certificate>,
    pub(crate) quotient: Option<RestrictedLiePresentation>,
    pub(crate) words: Vec<CorrectWord>,
    /// `products[a * d + b]` = `b_a b_b` in `B` coordinates.
    pub(crate) products: Vec<Vec<u64>>,
    pub(crate) memo_mu: [Mutex<HashMap<(usize, usize), Arc<Op>>>; 2],
    pub(crate) memo_mult: [Mutex<HashMap<(usize, usize), Arc<Op>>>; 2],
    pub(crate) audit: OnceLock<AuditReport>,
}

impl std::fmt::Debug for DiffContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DiffContext")
            .field("model_dim", &self.alg.dim())
            .field("lie_dim", &self.lie.dim())
            .field("k_dim", &self.inner.k.dim())
            .field("b_dim", &self.inner.b.dim())
            .field("outer", &self.mus.len())
            .finish()
    }
}

impl DiffContext {
    /// `L` is the restricted closure of `gens`; outer generators are picked
    /// greedily from `gens` and then from the basis of `L`.
    pub fn new(alg: Arc<AlgebraPresentation>, gens: &[Derivation]) -> Result<Self> {
        let lie = restricted_closure(&alg, gens)?;
        let inner = inner_part(&lie)?;
        let k_rows = inner_rows(&alg, &inner);
        let mut mus: Vec<Derivation> = Vec::new();
        let mut span_rows = k_rows.clone();
        for cand in gens.iter().chain(lie.basis()) {
            if !in_span(&alg, &span_rows, cand) {
                span_rows.push(cand.matrix().data().to_vec());
                mus.push(cand.clone());
            }
        }
        Self::assemble(alg, lie, inner, k_rows, mus, false)
    }

    /// Use `outer` verbatim as `mu_1..mu_m`, with `L` the restricted closure
    /// of `gens` and `outer`. The generators may be inner derivations; such a
    /// context is formal: normal forms still evaluate correctly but are not
    /// unique and no quotient presentation is extracted.
    pub fn with_outer(alg: Arc<AlgebraPresentation>, gens: &[Derivation], outer: &[Derivation]) -> Result<Self> {
        let all: Vec<Derivation> = gens.iter().chain(outer).cloned().collect();
        let lie = restricted_closure(&alg, &all)?;
        let inner = inner_part(&lie)?;
        let k_rows = inner_rows(&alg, &inner);
        let mut rows = k_rows.clone();
        rows.extend(outer.iter().map(|d| d.matrix().data().to_vec()));
        for d in lie.basis() {
            if !in_span(&alg, &rows, d) {
                return Err(Error::invalid("outer generators and inner derivations do not span L"));
            }
        }
        let mut span_rows = k_rows.clone();
        let mut formal = false;
        for d in outer {
            if in_span(&alg, &span_rows, d) {
                formal = true;
            }
            span_rows.push(d.matrix().data().to_vec());
        }
        Self::assemble(alg, lie, inner, k_rows, outer.to_vec(), formal)
    }

    fn assemble(
        alg: Arc<AlgebraPresentation>,
        lie: DeltaLieAlgebra,
        inner: InnerPart,
        k_rows: Vec<Vec<u64>>,
        mus: Vec<Derivation>,
        formal: bool,
    ) -> Result<Self> {
        let n = alg.dim();
        let p = alg.p();
        let m = mus.len();
        if m > 8 {
            return Err(Error::invalid("more than 8 outer generators"));
        }

        // rows: mu_1..mu_m, then (k_t)^-
        let mut rows: Vec<Vec<u64>> = mus.iter().map(|d| d.matrix().data().to_vec()).collect();
        rows.extend(k_rows);
        let system = FpMatrix::from_row_vectors(p, n * n, &rows);
        let kb = inner.k.basis_vectors();
        let certify = |d: &Derivation| -> Result<Certificate> {
            let coords = system
                .express_row(d.matrix().data())
                .ok_or_else(|| Error::violation("closure certificate missing: element outside L"))?;
            let mut b = vec![0u64; n];
            for (t, &beta) in coords[m..].iter().enumerate() {
                for (o, &x) in b.iter_mut().zip(&kb[t]) {
                    *o = (*o + beta * x) % p;
                }
            }
            let b = inner
                .restrict(&b)
                .ok_or_else(|| Error::violation("K(L) element outside B(L)"))?;
            Ok(Certificate {
                c: coords[..m].to_vec(),
                b,
            })
        };
        let mut brackets = Vec::with_capacity(m);
        for i in 0..m {
            let mut row = Vec::with_capacity(m);
            for j in 0..m {
                row.push(certify(&mus[i].bracket(&mus[j])?)?);
            }
            brackets.push(row);
        }
        let powers = mus
            .iter()
            .map(|d| certify(&d.p_power()?))
            .collect::<Result<Vec<_>>>()?;
        let quotient = if formal {
            None
        } else {
            Some(
                RestrictedLiePresentation::new(
                    p,
                    brackets
                        .iter()
                        .map(|r| r.iter().map(|c| c.c.clone()).collect())
                        .collect(),
                    powers.iter().map(|c| c.c.clone()).collect(),
                )
                .map_err(|e| Error::violation(format!("quotient of L by inner derivations: {}", e)))?,
            )
        };

        let mut mu_on_b = Vec::with_capacity(m);
        for mu in &mus {
            let mut rows = Vec::new();
            for q in inner.b.basis_vectors() {
                rows.push(
                    inner
                        .restrict(&mu.apply(&q))
                        .ok_or_else(|| Error::violation("B(L) not stable under an outer generator"))?,
                );
            }
            mu_on_b.push(FpMatrix::from_row_vectors(p, inner.dim(), &rows));
        }
        let d = inner.dim();
        let b_alg = &inner.b_alg;
        let products = (0..d * d).map(|ab| b_alg.basis_product(ab / d, ab % d)).collect();
        if word_count(p, m) * d * d > 1 << 22 {
            return Err(Error::invalid("operator space too large for dense normal forms"));
        }
        Ok(DiffContext {
            words: CorrectWord::all(p, m),
            alg,
            lie,
            inner,
            mus,
            mu_on_b,
            brackets,
            powers,
            quotient,
            products,
            memo_mu: [Mutex::new(HashMap::new()), Mutex::new(HashMap::new())],
            memo_mult: [Mutex::new(HashMap::new()), Mutex::new(HashMap::new())],
            audit: OnceLock::new(),
        })
    }

    pub fn algebra(&self) -> &Arc<AlgebraPresentation> {
        &self.alg
    }

    pub fn lie(&self) -> &DeltaLieAlgebra {
        &self.lie
    }

    pub fn inner(&self) -> &InnerPart {
        &self.inner
    }

    pub fn outer(&self) -> &[Derivation] {
        &self.mus
    }

    pub fn m(&self) -> usize {
        self.mus.len()
    }

    pub fn p(&self) -> u64 {
        self.alg.p()
    }

    pub fn b_dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn words(&self) -> &[CorrectWord] {
        &self.words
    }

    /// `L / K(L)^-` with the bracket and p-map read off the certificates.
    /// `None` for formal contexts.
    pub fn quotient_presentation(&self) -> Option<&RestrictedLiePresentation> {
        self.quotient.as_ref()
    }

    pub fn is_formal(&self) -> bool {
        self.quotient.is_none()
    }

    pub fn bracket_certificate(&self, i: usize, j: usize) -> &Certificate {
        &self.brackets[i][j]
    }

    pub fn power_certificate(&self, i: usize) -> &Certificate {
        &self.powers[i]
    }

    /// Re-verify `[mu_i, mu_j]` and `mu_i^p` against their certificates.
    pub fn verify_certificates(&self) -> Result<()> {
        let rebuild = |c: &Certificate| -> Result<Derivation> {
            let mut acc = Derivation::zero(self.alg.clone());
            for (mu, &k) in self.mus.iter().zip(&c.c) {
                acc = acc.add(&mu.scale(k))?;
            }
            let b = self.inner.embed(&c.b);
            let bm = Derivation::new(self.alg.clone(), inner_matrix(&self.alg, &b))?;
            acc.add(&bm)
        };
        for i in 0..self.m() {
            for j in 0..self.m() {
                if rebuild(&self.brackets[i][j])? != self.mus[i].bracket(&self.mus[j])? {
                    return Err(Error::violation(format!("bracket certificate ({}, {}) is wrong", i, j)));
                }
            }
            if rebuild(&self.powers[i])? != self.mus[i].p_power()? {
                return Err(Error::violation(format!("p-th power certificate {} is wrong", i)));
            }
        }
        Ok(())
    }

    pub(crate) fn tensor_len(&self) -> usize {
        self.b_dim() * self.b_dim()
    }

    /// `1 (x) 1`.
    pub(crate) fn unit_tensor(&self) -> Vec<u64> {
        let u = self.inner.b_alg.unit();
        outer_product(u, u, self.p())
    }

    /// `1 (x) b - b (x) 1`, the tensor of `b^-`.
    pub(crate) fn inner_tensor(&self, b: &[u64]) -> Vec<u64> {
        let p = self.p();
        let u = self.inner.b_alg.unit();
        let x = outer_product(u, b, p);
        let y = outer_product(b, u, p);
        x.iter().zip(&y).map(|(&a, &c)| scalar::sub(a, c, p)).collect()
    }

    /// `D_mu(l (x) r) = l^mu (x) r + l (x) r^mu`.
    pub(crate) fn derive_tensor(&self, i: usize, t: &[u64]) -> Vec<u64> {
        let d = self.b_dim();
        let p = self.p();
        let m = &self.mu_on_b[i];
        let mut out = vec![0u64; d * d];
        for a in 0..d {
            for b in 0..d {
                let c = t[a * d + b];
                if c == 0 {
                    continue;
                }
                for (a2, &v) in m.row(a).iter().enumerate() {
                    if v != 0 {
                        out[a2 * d + b] = (out[a2 * d + b] + c * v) % p;
                    }
                }
                for (b2, &v) in m.row(b).iter().enumerate() {
                    if v != 0 {
                        out[a * d + b2] = (out[a * d + b2] + c * v) % p;
                    }
                }
            }
        }
        out
    }

    /// Composition of multiplication operators in the given order:
    /// `first` then `second` is `(l2 l1) (x) (r1 r2)`.
    pub(crate) fn compose_tensors(&self, first: &[u64], second: &[u64]) -> Vec<u64> {
        let d = self.b_dim();
        let p = self.p();
        let mut out = vec![0u64; d * d];
        for a1 in 0..d {
            for b1 in 0..d {
                let c1 = first[a1 * d + b1];
                if c1 == 0 {
                    continue;
                }
                for a2 in 0..d {
                    for b2 in 0..d {
                        let c2 = second[a2 * d + b2];
                        if c2 == 0 {
                            continue;
                        }
                        let c = c1 * c2 % p;
                        let l = &self.products[a2 * d + a1];
                        let r = &self.products[b1 * d + b2];
                        for (x, &lv) in l.iter().enumerate() {
                            if lv == 0 {
                                continue;
                            }
                            let cl = c * lv % p;
                            for (y, &rv) in r.iter().enumerate() {
                                if rv != 0 {
                                    out[x * d + y] = (out[x * d + y] + cl * rv) % p;
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    pub(crate) fn memo_index(o: Orientation) -> usize {
        match o {
            Orientation::Right => 0,
            Orientation::Left => 1,
        }
    }
}

fn inner_rows(alg: &AlgebraPresentation, inner: &InnerPart) -> Vec<Vec<u64>> {
    inner
        .k
        .basis_vectors()
        .iter()
        .map(|q| inner_matrix(alg, q).data().to_vec())
        .collect()
}

fn in_span(alg: &AlgebraPresentation, rows: &[Vec<u64>], d: &Derivation) -> bool {
    let v = d.matrix().data();
    if v.iter().all(|&x| x == 0) {
        return true;
    }
    if rows.is_empty() {
        return false;
    }
    let n = alg.dim();
    FpMatrix::from_row_vectors(alg.p(), n * n, rows).express_row(v).is_some()
}

pub(crate) fn outer_product(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let d = b.len();
    let mut out = vec![0u64; a.len() * d];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i * d + j] = x * y % p;
        }
    }
    out
}
