use serde::Serialize;

use crate::derivation::{is_differential_ideal, InnerPart};
use crate::error::{Error, Result};
use crate::linalg::Subspace;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    /// Central idempotent with `eB = l(M0)`, in `B` coordinates.
    pub e: Vec<u64>,
    /// `e` in model coordinates.
    pub e_model: Vec<u64>,
    pub annihilator: Vec<Vec<u64>>,
    pub complement: Vec<Vec<u64>>,
}

/// Splits `B = l(M0) + M0` for a differential ideal `M0` (in `B` coordinates)
/// and returns the central idempotent of the first summand.
pub fn qf_decomposition(inner: &InnerPart, m0: &Subspace) -> Result<Decomposition> {
    let b = &inner.b_alg;
    let p = b.p();
    if m0.ambient_dim() != b.dim() {
        return Err(Error::AmbientMismatch(m0.ambient_dim(), b.dim()));
    }
    if !is_differential_ideal(inner, m0)? {
        return Err(Error::invalid("M0 is not a differential ideal of B(L)"));
    }
    if m0.contains(b.unit())? {
        return Err(Error::invalid("M0 contains the unit"));
    }
    let l = b.left_annihilator(m0)?;
    if !l.intersect(m0)?.is_zero() {
        return Err(Error::invalid(
            "l(M0) meets M0: B(L) has a nonzero differential ideal of square zero, so it is not differentially semisimple",
        ));
    }
    if !l.sum(m0)?.is_full() {
        return Err(Error::invalid("l(M0) + M0 is not all of B(L)"));
    }
    // 1 = e + f with e in l(M0), f in M0
    let mut rows = l.basis_vectors();
    rows.extend(m0.basis_vectors());
    let joint = crate::linalg::FpMatrix::from_row_vectors(p, b.dim(), &rows);
    let coords = joint.express_row(b.unit()).ok_or_else(|| Error::violation("unit outside l(M0) + M0"))?;
    let e = l.combine(&coords[..l.dim()]);
    if b.mul_coords(&e, &e) != e {
        return Err(Error::violation("the l(M0) component of 1 is not idempotent"));
    }
    for i in 0..b.dim() {
        let x = crate::algebra::unit_vector(b.dim(), i);
        if b.mul_coords(&e, &x) != b.mul_coords(&x, &e) {
            return Err(Error::violation("the l(M0) component of 1 is not central"));
        }
    }
    let eb = b.ideal_of_space(None, &b.span(&[e.clone()]))?;
    if eb != l {
        return Err(Error::violation("eB differs from l(M0)"));
    }
    Ok(Decomposition {
        e_model: inner.embed(&e),
        e,
        annihilator: l.basis_vectors(),
        complement: m0.basis_vectors(),
    })
}
