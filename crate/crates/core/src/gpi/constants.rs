use serde::Serialize;

use crate::algebra::unit_vector;
use crate::derivation::constants;
use crate::diffop::{DiffContext, DiffOpExpr, Factor, NormalForm, OpTerm, Orientation};
use crate::envelope::{build_envelope, top_annihilator_element};
use crate::error::{Error, Result};
use crate::frobenius::ConjugatePair;
use crate::linalg::Subspace;

/// `c(x) = sum a_i x a*_i` for dual bases `a_i` of `lambda` and `a*_i` of
/// `rho`, with all elements in model coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CentralMixer {
    pub terms: Vec<(Vec<u64>, Vec<u64>)>,
}

impl CentralMixer {
    pub fn apply(&self, ctx: &DiffContext, x: &[u64]) -> Vec<u64> {
        let a = ctx.algebra();
        let p = a.p();
        let mut out = vec![0u64; a.dim()];
        for (l, r) in &self.terms {
            let v = a.mul_coords(&a.mul_coords(l, x), r);
            for (o, y) in out.iter_mut().zip(v) {
                *o = (*o + y) % p;
            }
        }
        out
    }
}

/// Build `c` for a conjugate pair of `B(L)` (given in `B` coordinates) and
/// check on the model basis that every value commutes with `B(L)` and is
/// killed by every inner derivation in `K(L)^-`.
pub fn central_mixer(ctx: &DiffContext, pair: &ConjugatePair) -> Result<CentralMixer> {
    if !pair.duality_holds() {
        return Err(Error::violation("dual bases fail the duality equations"));
    }
    let inner = ctx.inner();
    if pair.rho.ambient_dim() != inner.dim() {
        return Err(Error::AmbientMismatch(pair.rho.ambient_dim(), inner.dim()));
    }
    let terms: Vec<(Vec<u64>, Vec<u64>)> = pair
        .lambda_basis
        .iter()
        .zip(&pair.rho_basis)
        .map(|(l, r)| (inner.embed(l), inner.embed(r)))
        .collect();
    let mixer = CentralMixer { terms };
    let a = ctx.algebra();
    let n = a.dim();
    let bs = inner.b.basis_vectors();
    let ks = inner.k.basis_vectors();
    for i in 0..n {
        let c = mixer.apply(ctx, &unit_vector(n, i));
        for b in &bs {
            if a.mul_coords(b, &c) != a.mul_coords(&c, b) {
                return Err(Error::violation(format!(
                    "c(e{}) does not commute with {}",
                    i,
                    a.format_coords(b)
                )));
            }
        }
        for k in &ks {
            if a.mul_coords(&c, k) != a.mul_coords(k, &c) {
                return Err(Error::violation(format!("an inner derivation of K(L) moves c(e{})", i)));
            }
        }
    }
    Ok(mixer)
}

/// `u = sum a_i^l (a*_i)^r f`: the mixer followed by the top annihilator
/// element of the restricted envelope of `L / K(L)^-`.
#[derive(Clone, Debug, Serialize)]
pub struct ConstantsOperator {
    pub mixer: CentralMixer,
    /// Coefficients of `f` on the correct words.
    pub f: Vec<u64>,
    pub operator: NormalForm,
    pub constants_dim: usize,
    pub image_dim: usize,
    pub nonzero: bool,
}

pub fn constants_operator(ctx: &DiffContext, pair: &ConjugatePair) -> Result<ConstantsOperator> {
    let mixer = central_mixer(ctx, pair)?;
    let quotient = ctx
        .quotient_presentation()
        .ok_or_else(|| Error::invalid("formal contexts have no outer quotient"))?;
    let env = build_envelope(quotient)?;
    let top = top_annihilator_element(&env)?;
    let mut terms = Vec::new();
    for (w, &c) in top.f.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let word = &ctx.words()[w];
        for (l, r) in &mixer.terms {
            let mut factors = vec![Factor::Left(l.clone()), Factor::Right(r.clone())];
            for (i, &s) in word.exponents.iter().enumerate() {
                if s > 0 {
                    factors.push(Factor::Mu(i, s as u32));
                }
            }
            terms.push(OpTerm { coeff: c, factors });
        }
    }
    let operator = ctx.normalize(&DiffOpExpr { terms }, Orientation::Right)?;
    let a = ctx.algebra();
    let n = a.dim();
    let consts = constants(ctx.lie(), &a.full_space())?;
    let mut images = Vec::with_capacity(n);
    for i in 0..n {
        let y = ctx.evaluate(&operator, &unit_vector(n, i))?;
        if !consts.contains(&y)? {
            return Err(Error::violation(format!(
                "u(e{}) = {} is not a constant",
                i,
                a.format_coords(&y)
            )));
        }
        images.push(y);
    }
    let image = Subspace::span(a.p(), n, &images);
    Ok(ConstantsOperator {
        mixer,
        f: top.f,
        operator,
        constants_dim: consts.dim(),
        image_dim: image.dim(),
        nonzero: !image.is_zero(),
    })
}
