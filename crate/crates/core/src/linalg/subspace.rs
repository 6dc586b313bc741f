use super::matrix::FpMatrix;
use super::scalar;
use crate::error::{Error, Result};

/// A linear subspace of GF(p)^n stored as its reduced echelon basis.
///
/// The basis is canonical, so two subspaces are equal exactly when their
/// stored bases are identical and the derived `Eq` is set equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: FpMatrix,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(p: u64, ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: FpMatrix::zeros(p, 0, ambient),
            pivots: Vec::new(),
        }
    }

    pub fn full(p: u64, ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: FpMatrix::identity(p, ambient),
            pivots: (0..ambient).collect(),
        }
    }

    /// Row space of `m`.
    pub fn row_space(m: &FpMatrix) -> Self {
        let rref = m.rref();
        let r = rref.pivots.len();
        let cols = m.cols();
        let data = rref.matrix.data()[..r * cols].to_vec();
        Subspace {
            ambient: cols,
            basis: FpMatrix::from_raw(m.modulus(), r, cols, data),
            pivots: rref.pivots,
        }
    }

    pub fn span(p: u64, ambient: usize, vectors: &[Vec<u64>]) -> Self {
        if vectors.is_empty() {
            return Self::zero(p, ambient);
        }
        Self::row_space(&FpMatrix::from_row_vectors(p, ambient, vectors))
    }

    pub fn modulus(&self) -> u64 {
        self.basis.modulus()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    pub fn basis(&self) -> &FpMatrix {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn basis_vectors(&self) -> Vec<Vec<u64>> {
        self.basis.row_vectors()
    }

    pub fn basis_vector(&self, i: usize) -> &[u64] {
        self.basis.row(i)
    }

    fn check_ambient(&self, other: &Self) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::AmbientMismatch(self.ambient, other.ambient));
        }
        if self.modulus() != other.modulus() {
            return Err(Error::ModulusMismatch(self.modulus(), other.modulus()));
        }
        Ok(())
    }

    /// Coordinates of `v` in the stored basis, or `None` if `v` is not in the subspace.
    pub fn coordinates(&self, v: &[u64]) -> Result<Option<Vec<u64>>> {
        if v.len() != self.ambient {
            return Err(Error::AmbientMismatch(self.ambient, v.len()));
        }
        let p = self.modulus();
        let coords: Vec<u64> = self.pivots.iter().map(|&c| v[c] % p).collect();
        let recon = self.combine(&coords);
        Ok((recon.iter().zip(v).all(|(&a, &b)| a == b % p)).then_some(coords))
    }

    pub fn contains(&self, v: &[u64]) -> Result<bool> {
        Ok(self.coordinates(v)?.is_some())
    }

    /// Linear combination of the basis rows with the given coefficients.
    pub fn combine(&self, coords: &[u64]) -> Vec<u64> {
        assert_eq!(coords.len(), self.dim(), "coordinate length");
        let p = self.modulus();
        let mut out = vec![0u64; self.ambient];
        for (i, &c) in coords.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (o, &b) in out.iter_mut().zip(self.basis.row(i)) {
                *o = (*o + c * b) % p;
            }
        }
        out
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        Ok(Self::row_space(&self.basis.vstack(&other.basis)?))
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        let p = self.modulus();
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(p, self.ambient));
        }
        // x U = y V  <=>  (x, y) lies in the left kernel of [U; V] up to sign on y.
        let stacked = self.basis.vstack(&other.basis)?;
        let k = stacked.left_kernel();
        let d = self.dim();
        let vectors: Vec<Vec<u64>> = (0..k.rows())
            .map(|r| self.combine(&k.row(r)[..d]))
            .collect();
        Ok(Self::span(p, self.ambient, &vectors))
    }

    pub fn is_subspace_of(&self, other: &Self) -> Result<bool> {
        self.check_ambient(other)?;
        for r in 0..self.dim() {
            if !other.contains(self.basis.row(r))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `{w : w . v = 0 for all v in self}` under the standard dot product.
    pub fn orthogonal(&self) -> Self {
        if self.is_zero() {
            return Self::full(self.modulus(), self.ambient);
        }
        Self::row_space(&self.basis.kernel()).with_ambient(self.ambient)
    }

    fn with_ambient(mut self, ambient: usize) -> Self {
        if self.basis.rows() == 0 {
            self = Self::zero(self.modulus(), ambient);
        }
        self
    }

    /// Basis vectors completing this subspace to the full space, chosen among unit vectors.
    pub fn complement_basis(&self) -> Vec<Vec<u64>> {
        let mut is_pivot = vec![false; self.ambient];
        for &c in &self.pivots {
            is_pivot[c] = true;
        }
        (0..self.ambient)
            .filter(|&c| !is_pivot[c])
            .map(|c| {
                let mut v = vec![0; self.ambient];
                v[c] = 1;
                v
            })
            .collect()
    }

    /// Image of the subspace under `x -> x M` for a row-acting matrix `M`.
    pub fn image(&self, m: &FpMatrix) -> Result<Self> {
        if m.rows() != self.ambient {
            return Err(Error::ShapeMismatch(format!(
                "map with {} rows applied to ambient dimension {}",
                m.rows(),
                self.ambient
            )));
        }
        if self.is_zero() {
            return Ok(Self::zero(self.modulus(), m.cols()));
        }
        Ok(Self::row_space(&self.basis.mul(m)?))
    }
}

/// Scale a nonzero vector so that its first nonzero entry is 1.
pub fn normalize_leading(v: &mut [u64], p: u64) {
    if let Some(&lead) = v.iter().find(|&&x| x != 0) {
        let inv = scalar::inv(lead, p);
        for x in v.iter_mut() {
            *x = scalar::mul(*x, inv, p);
        }
    }
}

/// Iterate every vector of GF(p)^n whose first nonzero coordinate is 1.
///
/// Each one-dimensional subspace is visited exactly once; the caller must
/// check the count `(p^n - 1)/(p - 1)` against its budget first.
pub fn for_each_projective_point(p: u64, n: usize, mut f: impl FnMut(&[u64]) -> bool) {
    let mut v = vec![0u64; n];
    for lead in 0..n {
        v.iter_mut().for_each(|x| *x = 0);
        v[lead] = 1;
        'tails: loop {
            if !f(&v) {
                return;
            }
            let mut i = n;
            loop {
                if i == lead + 1 {
                    break 'tails;
                }
                i -= 1;
                v[i] += 1;
                if v[i] < p {
                    continue 'tails;
                }
                v[i] = 0;
            }
        }
    }
}

/// Number of projective points `(p^n - 1)/(p - 1)`, saturating.
pub fn projective_count(p: u64, n: usize) -> u128 {
    let mut total: u128 = 0;
    let mut pw: u128 = 1;
    for _ in 0..n {
        total = total.saturating_add(pw);
        pw = pw.saturating_mul(p as u128);
    }
    total
}

impl std::fmt::Debug for Subspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Subspace(dim {} in {}, basis {:?})",
            self.dim(),
            self.ambient,
            self.basis.row_vectors()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn span(p: u64, n: usize, vs: &[&[u64]]) -> Subspace {
        Subspace::span(p, n, &vs.iter().map(|v| v.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn sum_with_zero_and_intersect_with_full() {
        let u = span(3, 3, &[&[1, 2, 0], &[0, 1, 1]]);
        assert_eq!(u.sum(&Subspace::zero(3, 3)).unwrap(), u);
        assert_eq!(u.intersect(&Subspace::full(3, 3)).unwrap(), u);
    }

    #[test]
    fn coordinate_axes_sum_to_plane() {
        let s = span(2, 2, &[&[1, 0]])
            .sum(&span(2, 2, &[&[0, 1]]))
            .unwrap();
        assert!(s.is_full());
    }

    #[test]
    fn intersection_of_coordinate_planes() {
        let u = span(2, 3, &[&[1, 0, 0], &[0, 1, 0]]);
        let v = span(2, 3, &[&[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(u.intersect(&v).unwrap(), span(2, 3, &[&[0, 1, 0]]));
    }

    #[test]
    fn ambient_mismatch_rejected() {
        let u = Subspace::full(2, 2);
        let v = Subspace::full(2, 3);
        assert_eq!(u.sum(&v), Err(Error::AmbientMismatch(2, 3)));
        assert!(u.intersect(&v).is_err());
        assert!(u.contains(&[1, 0, 0]).is_err());
    }

    #[test]
    fn projective_points_are_enumerated_once() {
        for (p, n) in [(2u64, 3usize), (3, 2), (5, 2), (3, 3)] {
            let mut seen = std::collections::HashSet::new();
            for_each_projective_point(p, n, |v| {
                assert_eq!(v.iter().find(|&&x| x != 0), Some(&1));
                assert!(seen.insert(v.to_vec()));
                true
            });
            assert_eq!(seen.len() as u128, projective_count(p, n));
        }
    }

    #[test]
    fn orthogonal_complement_dimension() {
        let u = span(5, 4, &[&[1, 2, 3, 4], &[0, 1, 0, 1]]);
        let w = u.orthogonal();
        assert_eq!(w.dim(), 2);
        for a in u.basis_vectors() {
            for b in w.basis_vectors() {
                let dot: u64 = a.iter().zip(&b).map(|(x, y)| x * y).sum::<u64>() % 5;
                assert_eq!(dot, 0);
            }
        }
    }
}
