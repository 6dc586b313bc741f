use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{scalar, FpMatrix};

use super::element::AlgebraElement;

/// Dimension up to which structure constants are stored as a dense cube.
pub const DENSE_LIMIT: usize = 64;

#[derive(Clone, PartialEq, Eq)]
enum StructureConstants {
    /// `data[(i * n + j) * n + k]` is the coefficient of `e_k` in `e_i e_j`.
    Dense(Vec<u64>),
    /// `terms[i * n + j]` lists the nonzero `(k, c)` of `e_i e_j`, sorted by `k`.
    Sparse(Vec<Vec<(usize, u64)>>),
}

/// A finite-dimensional unital associative algebra over GF(p) given by
/// structure constants on a named basis.
///
/// Construction verifies associativity on all basis triples and the unit law
/// on all basis elements, so every value of this type is a genuine unital
/// associative algebra.
#[derive(Clone, PartialEq, Eq)]
pub struct AlgebraPresentation {
    p: u64,
    names: Vec<String>,
    unit: Vec<u64>,
    table: StructureConstants,
}

impl AlgebraPresentation {
    /// Build from `(i, j, k, c)` entries meaning `e_i e_j` contains `c e_k`.
    /// Repeated entries for the same `(i, j, k)` are summed.
    pub fn from_triples(
        p: u64,
        names: Vec<String>,
        unit: Vec<i64>,
        triples: &[(usize, usize, usize, i64)],
    ) -> Result<Self> {
        scalar::check_modulus(p)?;
        let n = names.len();
        let mut products = vec![vec![0u64; n]; n * n];
        for (idx, &(i, j, k, c)) in triples.iter().enumerate() {
            if i >= n || j >= n || k >= n {
                return Err(Error::invalid(format!(
                    "structure constant {} refers to index outside 0..{}",
                    idx, n
                )));
            }
            let slot = &mut products[i * n + j][k];
            *slot = scalar::add(*slot, scalar::reduce(c, p), p);
        }
        if unit.len() != n {
            return Err(Error::invalid(format!(
                "unit has {} coordinates, expected {}",
                unit.len(),
                n
            )));
        }
        let unit = unit.iter().map(|&v| scalar::reduce(v, p)).collect();
        Self::from_products(p, names, unit, |i, j| products[i * n + j].clone())
    }

    /// Build from a product function on basis indices returning coordinates of `e_i e_j`.
    pub fn from_products(
        p: u64,
        names: Vec<String>,
        unit: Vec<u64>,
        product: impl Fn(usize, usize) -> Vec<u64>,
    ) -> Result<Self> {
        scalar::check_modulus(p)?;
        let n = names.len();
        if n == 0 {
            return Err(Error::invalid("an algebra needs at least one basis element"));
        }
        if unit.len() != n {
            return Err(Error::invalid(format!(
                "unit has {} coordinates, expected {}",
                unit.len(),
                n
            )));
        }
        let unit: Vec<u64> = unit.iter().map(|&v| v % p).collect();
        let table = if n <= DENSE_LIMIT {
            let mut data = vec![0u64; n * n * n];
            for i in 0..n {
                for j in 0..n {
                    let v = product(i, j);
                    check_len(&v, n)?;
                    for (k, &c) in v.iter().enumerate() {
                        data[(i * n + j) * n + k] = c % p;
                    }
                }
            }
            StructureConstants::Dense(data)
        } else {
            let mut terms = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    let v = product(i, j);
                    check_len(&v, n)?;
                    terms.push(
                        v.iter()
                            .enumerate()
                            .filter(|(_, &c)| c % p != 0)
                            .map(|(k, &c)| (k, c % p))
                            .collect(),
                    );
                }
            }
            StructureConstants::Sparse(terms)
        };
        let alg = AlgebraPresentation {
            p,
            names,
            unit,
            table,
        };
        alg.audit()?;
        Ok(alg)
    }

    /// Exhaustive associativity check on basis triples plus the unit law.
    pub fn audit(&self) -> Result<()> {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                let ij = self.basis_product(i, j);
                for k in 0..n {
                    let left = self.mul_coords(&ij, &unit_vector(n, k));
                    let jk = self.basis_product(j, k);
                    let right = self.mul_coords(&unit_vector(n, i), &jk);
                    if left != right {
                        return Err(Error::NotAssociative(i, j, k));
                    }
                }
            }
        }
        for i in 0..n {
            let e = unit_vector(n, i);
            if self.mul_coords(&self.unit, &e) != e || self.mul_coords(&e, &self.unit) != e {
                return Err(Error::NotUnital(i));
            }
        }
        Ok(())
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn unit(&self) -> &[u64] {
        &self.unit
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Invoke `f(k, c)` for every nonzero coefficient of `e_i e_j`.
    #[inline]
    pub fn for_each_term(&self, i: usize, j: usize, mut f: impl FnMut(usize, u64)) {
        let n = self.dim();
        match &self.table {
            StructureConstants::Dense(data) => {
                let base = (i * n + j) * n;
                for (k, &c) in data[base..base + n].iter().enumerate() {
                    if c != 0 {
                        f(k, c);
                    }
                }
            }
            StructureConstants::Sparse(terms) => {
                for &(k, c) in &terms[i * n + j] {
                    f(k, c);
                }
            }
        }
    }

    pub fn basis_product(&self, i: usize, j: usize) -> Vec<u64> {
        let mut out = vec![0u64; self.dim()];
        self.for_each_term(i, j, |k, c| out[k] = c);
        out
    }

    /// Bilinear product on coordinate vectors.
    pub fn mul_coords(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        let n = self.dim();
        let p = self.p;
        debug_assert_eq!(x.len(), n);
        debug_assert_eq!(y.len(), n);
        let mut out = vec![0u64; n];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                if yj == 0 {
                    continue;
                }
                let c0 = xi * yj % p;
                self.for_each_term(i, j, |k, c| {
                    out[k] = (out[k] + c0 * c) % p;
                });
            }
        }
        out
    }

    /// Sorted nonzero structure constants `(i, j, k, c)`.
    pub fn triples(&self) -> Vec<(usize, usize, usize, u64)> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                self.for_each_term(i, j, |k, c| out.push((i, j, k, c)));
            }
        }
        out
    }

    /// Row-acting matrix of `x -> a x`.
    pub fn left_mult_matrix(&self, a: &[u64]) -> FpMatrix {
        let n = self.dim();
        let rows: Vec<Vec<u64>> = (0..n)
            .map(|i| self.mul_coords(a, &unit_vector(n, i)))
            .collect();
        FpMatrix::from_row_vectors(self.p, n, &rows)
    }

    /// Row-acting matrix of `x -> x a`.
    pub fn right_mult_matrix(&self, a: &[u64]) -> FpMatrix {
        let n = self.dim();
        let rows: Vec<Vec<u64>> = (0..n)
            .map(|i| self.mul_coords(&unit_vector(n, i), a))
            .collect();
        FpMatrix::from_row_vectors(self.p, n, &rows)
    }

    pub fn is_commutative(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| self.basis_product(i, j) == self.basis_product(j, i)))
    }

    pub fn element(self: &Arc<Self>, coords: Vec<u64>) -> Result<AlgebraElement> {
        AlgebraElement::new(self.clone(), coords)
    }

    pub fn basis_element(self: &Arc<Self>, i: usize) -> AlgebraElement {
        AlgebraElement::new(self.clone(), unit_vector(self.dim(), i)).expect("basis index")
    }

    pub fn one(self: &Arc<Self>) -> AlgebraElement {
        AlgebraElement::new(self.clone(), self.unit.clone()).expect("unit length")
    }

    pub fn zero(self: &Arc<Self>) -> AlgebraElement {
        AlgebraElement::new(self.clone(), vec![0; self.dim()]).expect("zero length")
    }

    /// Render coordinates as a linear combination of basis names.
    pub fn format_coords(&self, coords: &[u64]) -> String {
        let mut parts = Vec::new();
        for (k, &c) in coords.iter().enumerate() {
            match c {
                0 => {}
                1 => parts.push(self.names[k].clone()),
                _ => parts.push(format!("{}*{}", c, self.names[k])),
            }
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }

    pub(crate) fn with_names(mut self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.names.len());
        self.names = names;
        self
    }
}

fn check_len(v: &[u64], n: usize) -> Result<()> {
    if v.len() != n {
        return Err(Error::invalid(format!(
            "product has {} coordinates, expected {}",
            v.len(),
            n
        )));
    }
    Ok(())
}

pub fn unit_vector(n: usize, i: usize) -> Vec<u64> {
    let mut v = vec![0u64; n];
    v[i] = 1;
    v
}

impl fmt::Debug for AlgebraPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AlgebraPresentation")
            .field("p", &self.p)
            .field("names", &self.names)
            .field("unit", &self.unit)
            .field("nonzero_constants", &self.triples().len())
            .finish()
    }
}
