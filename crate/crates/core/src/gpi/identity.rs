use serde::Serialize;

use crate::algebra::{unit_vector, AlgebraPresentation};
use crate::config::SearchConfig;
use crate::derivation::InnerPart;
use crate::error::{Error, Result};
use crate::frobenius::{ConjugatePair, QfAnalysis};
use crate::linalg::Subspace;

use super::poly::MultilinearPoly;

/// Largest dense tensor or tuple sweep attempted.
const SWEEP_LIMIT: usize = 1 << 24;

/// `f(sum_i a_i1 x_1 a*_i1, ..., sum_i a_in x_n a*_in)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneralizedPoly {
    pub shape: MultilinearPoly,
    /// Per slot, the pairs `(a_ij, a*_ij)` in ambient coordinates.
    pub slots: Vec<Vec<(Vec<u64>, Vec<u64>)>>,
    pub ambient_dim: usize,
}

/// One slot per pair; `a_i` runs over the basis of `lambda` and `a*_i` over
/// the dual basis of `rho`.
pub fn build_gpi(f: &MultilinearPoly, pairs: &[&ConjugatePair]) -> Result<GeneralizedPoly> {
    if pairs.len() != f.arity() {
        return Err(Error::ShapeMismatch(format!("{} pairs for arity {}", pairs.len(), f.arity())));
    }
    let ambient_dim = pairs[0].rho.ambient_dim();
    let mut slots = Vec::with_capacity(pairs.len());
    for pair in pairs {
        if pair.rho.ambient_dim() != ambient_dim {
            return Err(Error::AmbientMismatch(pair.rho.ambient_dim(), ambient_dim));
        }
        let slot: Vec<_> = pair
            .lambda_basis
            .iter()
            .cloned()
            .zip(pair.rho_basis.iter().cloned())
            .collect();
        if slot.is_empty() {
            return Err(Error::invalid("conjugate pair of zero ideals"));
        }
        slots.push(slot);
    }
    Ok(GeneralizedPoly {
        shape: f.clone(),
        slots,
        ambient_dim,
    })
}

impl GeneralizedPoly {
    /// The same identity with coefficients pushed from `B(L)` into the model.
    pub fn embed(&self, inner: &InnerPart) -> Result<GeneralizedPoly> {
        if self.ambient_dim != inner.dim() {
            return Err(Error::AmbientMismatch(self.ambient_dim, inner.dim()));
        }
        Ok(GeneralizedPoly {
            shape: self.shape.clone(),
            slots: self
                .slots
                .iter()
                .map(|s| s.iter().map(|(a, b)| (inner.embed(a), inner.embed(b))).collect())
                .collect(),
            ambient_dim: inner.embedding.cols(),
        })
    }

    fn slot_value(&self, alg: &AlgebraPresentation, j: usize, x: &[u64]) -> Vec<u64> {
        let p = alg.p();
        let mut out = vec![0u64; alg.dim()];
        for (a, b) in &self.slots[j] {
            let v = alg.mul_coords(&alg.mul_coords(a, x), b);
            for (o, y) in out.iter_mut().zip(v) {
                *o = (*o + y) % p;
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HoldsReport {
    pub holds: bool,
    /// Basis indices of a tuple with a nonzero value.
    pub witness: Option<Vec<usize>>,
    pub tuples_checked: usize,
}

/// Exhaustive check on basis tuples, which suffices by multilinearity.
pub fn holds_on(gp: &GeneralizedPoly, alg: &AlgebraPresentation) -> Result<HoldsReport> {
    let n = alg.dim();
    if gp.ambient_dim != n {
        return Err(Error::AmbientMismatch(gp.ambient_dim, n));
    }
    let arity = gp.shape.arity();
    let total = n.checked_pow(arity as u32).filter(|&t| t <= SWEEP_LIMIT);
    let total = total.ok_or_else(|| Error::invalid("too many basis tuples"))?;
    let values: Vec<Vec<Vec<u64>>> = (0..arity)
        .map(|j| (0..n).map(|i| gp.slot_value(alg, j, &unit_vector(n, i))).collect())
        .collect();
    let mut idx = vec![0usize; arity];
    for t in 0..total {
        let mut r = t;
        for slot in idx.iter_mut().rev() {
            *slot = r % n;
            r /= n;
        }
        let args: Vec<Vec<u64>> = idx.iter().enumerate().map(|(j, &i)| values[j][i].clone()).collect();
        let v = gp.shape.eval(&args, |x, y| alg.mul_coords(x, y));
        if v.iter().any(|&c| c != 0) {
            return Ok(HoldsReport {
                holds: false,
                witness: Some(idx),
                tuples_checked: t + 1,
            });
        }
    }
    Ok(HoldsReport {
        holds: true,
        witness: None,
        tuples_checked: total,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonomialTrace {
    /// 1-based variable order.
    pub order: Vec<usize>,
    pub coeff: u64,
    /// Nonzero entries of the coefficient tensor.
    pub support: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormalTriviality {
    pub trivial: bool,
    pub monomials: Vec<MonomialTrace>,
    pub verdict: &'static str,
}

/// Coefficient tensor `c_0 (x) c_1 (x) ... (x) c_n` of the generalized
/// monomial for variable order `order`, where `c_0 = a_(order 1)`,
/// `c_k = a*_(order k) a_(order k+1)` and `c_n = a*_(order n)`.
pub fn monomial_tensor(gp: &GeneralizedPoly, alg: &AlgebraPresentation, order: &[usize]) -> Result<Vec<u64>> {
    let n = alg.dim();
    let p = alg.p();
    let k = order.len();
    let size = n.checked_pow(k as u32 + 1).filter(|&s| s <= SWEEP_LIMIT);
    let size = size.ok_or_else(|| Error::invalid("coefficient tensor too large"))?;
    let mut tensor = vec![0u64; size];
    let mut choice = vec![0usize; k];
    loop {
        let mut factors: Vec<Vec<u64>> = Vec::with_capacity(k + 1);
        factors.push(gp.slots[order[0]][choice[0]].0.clone());
        for s in 0..k - 1 {
            let left = &gp.slots[order[s]][choice[s]].1;
            let right = &gp.slots[order[s + 1]][choice[s + 1]].0;
            factors.push(alg.mul_coords(left, right));
        }
        factors.push(gp.slots[order[k - 1]][choice[k - 1]].1.clone());
        accumulate_outer(&mut tensor, &factors, n, p);
        // advance the mixed-radix counter
        let mut s = k;
        loop {
            if s == 0 {
                return Ok(tensor);
            }
            s -= 1;
            choice[s] += 1;
            if choice[s] < gp.slots[order[s]].len() {
                break;
            }
            choice[s] = 0;
        }
    }
}

fn accumulate_outer(tensor: &mut [u64], factors: &[Vec<u64>], n: usize, p: u64) {
    fn go(tensor: &mut [u64], factors: &[Vec<u64>], n: usize, p: u64, offset: usize, coeff: u64) {
        let Some((first, rest)) = factors.split_first() else {
            tensor[offset] = (tensor[offset] + coeff) % p;
            return;
        };
        for (i, &c) in first.iter().enumerate() {
            if c != 0 {
                go(tensor, rest, n, p, offset * n + i, coeff * c % p);
            }
        }
    }
    if factors.iter().any(|f| f.iter().all(|&c| c == 0)) {
        return;
    }
    go(tensor, factors, n, p, 0, 1);
}

/// Trivial iff every generalized monomial has a vanishing coefficient tensor
/// over the fixed basis.
pub fn is_formally_trivial(gp: &GeneralizedPoly, alg: &AlgebraPresentation) -> Result<FormalTriviality> {
    if gp.ambient_dim != alg.dim() {
        return Err(Error::AmbientMismatch(gp.ambient_dim, alg.dim()));
    }
    let mut monomials = Vec::new();
    let mut trivial = true;
    for (order, c) in gp.shape.terms() {
        let t = monomial_tensor(gp, alg, order)?;
        let support = t.iter().filter(|&&x| x != 0).count();
        trivial &= support == 0;
        monomials.push(MonomialTrace {
            order: order.iter().map(|i| i + 1).collect(),
            coeff: c,
            support,
        });
    }
    Ok(FormalTriviality {
        trivial,
        monomials,
        verdict: "tensor-criterion",
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BrConsistency {
    pub n: usize,
    pub br_dim: usize,
    /// Dimensions of `B_r^k` for `k = 0..=n`.
    pub br_power_dims: Vec<usize>,
    pub br_power_zero: bool,
    pub pairs: usize,
    pub family_size: usize,
    pub checked: usize,
    pub nontrivial_found: bool,
    /// Index tuple (into the right pairs) of a nontrivial identity.
    pub witness: Option<Vec<usize>>,
    pub consistent: bool,
    pub exact: bool,
    pub trace: Vec<String>,
}

/// Over all tuples of right conjugate pairs, some identity built from `f` is
/// formally nontrivial exactly when `B_r^n != 0`. A disagreement is a
/// violation.
pub fn triviality_vs_br(
    alg: &AlgebraPresentation,
    qf: &QfAnalysis,
    f: &MultilinearPoly,
    config: &SearchConfig,
) -> Result<BrConsistency> {
    let n = f.arity();
    let pairs = &qf.right_pairs;
    let mut dims = Vec::with_capacity(n + 1);
    let mut power = alg.span(&[alg.unit().to_vec()]);
    dims.push(power.dim());
    for _ in 0..n {
        power = alg.product_space(&power, &qf.br)?;
        dims.push(power.dim());
    }
    let zero = power.is_zero();
    let family_size = pairs.len().checked_pow(n as u32).unwrap_or(usize::MAX);
    let mut trace = vec![format!(
        "B_r has dimension {}; powers B_r^k for k = 0..{} have dimensions {:?}",
        qf.br.dim(),
        n,
        dims
    )];
    let mut checked = 0usize;
    let mut witness = None;
    let mut tuple = vec![0usize; n];
    if !pairs.is_empty() {
        loop {
            if checked as u64 >= config.budget {
                return Err(Error::Undecided(format!(
                    "{} identities exceed the budget of {}",
                    family_size, config.budget
                )));
            }
            let chosen: Vec<&ConjugatePair> = tuple.iter().map(|&i| &pairs[i]).collect();
            let gp = build_gpi(f, &chosen)?;
            checked += 1;
            if !is_formally_trivial(&gp, alg)?.trivial {
                witness = Some(tuple.clone());
                break;
            }
            let mut s = n;
            let mut done = true;
            while s > 0 {
                s -= 1;
                tuple[s] += 1;
                if tuple[s] < pairs.len() {
                    done = false;
                    break;
                }
                tuple[s] = 0;
            }
            if done {
                break;
            }
        }
    }
    let nontrivial_found = witness.is_some();
    if zero {
        for k in (0..=n).rev() {
            trace.push(format!(
                "k = {}: products of {} elements of B_r vanish{}",
                k,
                k,
                if k == n { " since B_r^n = 0" } else { " after commuting a*_ik past the slots" }
            ));
        }
        trace.push(format!("all {} identities are formally trivial", checked));
    } else if let Some(w) = &witness {
        trace.push(format!("B_r^{} != 0 and the identity on pairs {:?} is formally nontrivial", n, w));
    }
    let consistent = zero != nontrivial_found;
    if !consistent {
        return Err(Error::violation(format!(
            "B_r^{} {} but {} formally nontrivial identity was found",
            n,
            if zero { "= 0" } else { "!= 0" },
            if nontrivial_found { "a" } else { "no" }
        )));
    }
    Ok(BrConsistency {
        n,
        br_dim: qf.br.dim(),
        br_power_dims: dims,
        br_power_zero: zero,
        pairs: pairs.len(),
        family_size,
        checked,
        nontrivial_found,
        witness,
        consistent,
        exact: qf.exact,
        trace,
    })
}

/// Subspace spanned by `sum a_i x a*_i` over `x` in the basis; a helper for
/// reports on individual slots.
pub fn slot_image(gp: &GeneralizedPoly, alg: &AlgebraPresentation, j: usize) -> Subspace {
    let n = alg.dim();
    let v: Vec<Vec<u64>> = (0..n).map(|i| gp.slot_value(alg, j, &unit_vector(n, i))).collect();
    Subspace::span(alg.p(), n, &v)
}
