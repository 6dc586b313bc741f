use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::scalar;

use super::presentation::AlgebraPresentation;

/// A coordinate vector tied to its algebra.
#[derive(Clone)]
pub struct AlgebraElement {
    alg: Arc<AlgebraPresentation>,
    coords: Vec<u64>,
}

impl AlgebraElement {
    pub fn new(alg: Arc<AlgebraPresentation>, coords: Vec<u64>) -> Result<Self> {
        if coords.len() != alg.dim() {
            return Err(Error::AmbientMismatch(alg.dim(), coords.len()));
        }
        let p = alg.p();
        let coords = coords.into_iter().map(|c| c % p).collect();
        Ok(AlgebraElement { alg, coords })
    }

    pub fn algebra(&self) -> &Arc<AlgebraPresentation> {
        &self.alg
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<u64> {
        self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    fn check_parent(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.alg, &other.alg) || self.alg == other.alg {
            Ok(())
        } else {
            Err(Error::ParentMismatch)
        }
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_parent(other)?;
        Ok(AlgebraElement {
            alg: self.alg.clone(),
            coords: self.alg.mul_coords(&self.coords, &other.coords),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_parent(other)?;
        let p = self.alg.p();
        Ok(AlgebraElement {
            alg: self.alg.clone(),
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| scalar::add(a, b, p))
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_parent(other)?;
        let p = self.alg.p();
        Ok(AlgebraElement {
            alg: self.alg.clone(),
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| scalar::sub(a, b, p))
                .collect(),
        })
    }

    pub fn scale(&self, c: u64) -> Self {
        let p = self.alg.p();
        AlgebraElement {
            alg: self.alg.clone(),
            coords: self.coords.iter().map(|&a| scalar::mul(a, c % p, p)).collect(),
        }
    }

    pub fn pow(&self, exp: u64) -> Self {
        let mut acc = self.alg.one();
        for _ in 0..exp {
            acc = acc.multiply(self).expect("same parent");
        }
        acc
    }

    /// `x y - y x`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.multiply(other)?.sub(&other.multiply(self)?)
    }
}

impl PartialEq for AlgebraElement {
    fn eq(&self, other: &Self) -> bool {
        self.check_parent(other).is_ok() && self.coords == other.coords
    }
}

impl Eq for AlgebraElement {}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.alg.format_coords(&self.coords))
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.alg.format_coords(&self.coords))
    }
}
