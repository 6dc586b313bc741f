use std::fmt;

use super::scalar::{self, FpScalar};
use crate::error::{Error, Result};

/// A dense row-major matrix over GF(p).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FpMatrix {
    p: u64,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

/// Result of row reduction: the reduced matrix and its pivot columns.
#[derive(Clone, Debug)]
pub struct Rref {
    pub matrix: FpMatrix,
    pub pivots: Vec<usize>,
}

impl FpMatrix {
    pub fn zeros(p: u64, rows: usize, cols: usize) -> Self {
        FpMatrix {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(p: u64, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % p;
        }
        m
    }

    /// Build from reduced entries; the modulus must already be validated.
    pub fn from_raw(p: u64, rows: usize, cols: usize, data: Vec<u64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        debug_assert!(data.iter().all(|&v| v < p));
        FpMatrix { p, rows, cols, data }
    }

    /// Build from signed integer rows, reducing every entry mod `p`.
    pub fn from_rows(p: u64, rows: &[Vec<i64>]) -> Result<Self> {
        scalar::check_modulus(p)?;
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::ShapeMismatch(format!(
                    "row {} has {} entries, expected {}",
                    i,
                    row.len(),
                    cols
                )));
            }
            data.extend(row.iter().map(|&v| scalar::reduce(v, p)));
        }
        Ok(FpMatrix {
            p,
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_row_vectors(p: u64, cols: usize, rows: &[Vec<u64>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "row length");
            data.extend(row.iter().map(|&v| v % p));
        }
        FpMatrix {
            p,
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    pub fn entry(&self, r: usize, c: usize) -> FpScalar {
        FpScalar::from_raw(self.get(r, c), self.p)
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v % self.p;
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    fn row_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn column(&self, c: usize) -> Vec<u64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn data(&self) -> &[u64] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    fn check_same_field(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::ModulusMismatch(self.p, other.p));
        }
        Ok(())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.p, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_field(other)?;
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let p = self.p;
        let mut out = Self::zeros(p, self.rows, other.cols);
        let mut acc = vec![0u64; other.cols];
        for r in 0..self.rows {
            acc.iter_mut().for_each(|v| *v = 0);
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0 {
                    continue;
                }
                for (slot, &b) in acc.iter_mut().zip(other.row(k)) {
                    *slot = (*slot + a * b) % p;
                }
            }
            out.row_mut(r).copy_from_slice(&acc);
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, scalar::add)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, scalar::sub)
    }

    fn zip_with(&self, other: &Self, f: fn(u64, u64, u64) -> u64) -> Result<Self> {
        self.check_same_field(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let p = self.p;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b, p))
            .collect();
        Ok(FpMatrix {
            p,
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, c: u64) -> Self {
        let p = self.p;
        let c = c % p;
        FpMatrix {
            p,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| scalar::mul(v, c, p)).collect(),
        }
    }

    pub fn pow(&self, mut exp: u64) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::ShapeMismatch("power of a non-square matrix".into()));
        }
        let mut acc = Self::identity(self.p, self.rows);
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            base = base.mul(&base)?;
            exp >>= 1;
        }
        Ok(acc)
    }

    /// Stack `other` below `self`.
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        self.check_same_field(other)?;
        if self.cols != other.cols && self.rows > 0 && other.rows > 0 {
            return Err(Error::ShapeMismatch(format!(
                "vstack of widths {} and {}",
                self.cols, other.cols
            )));
        }
        let cols = if self.rows > 0 { self.cols } else { other.cols };
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(FpMatrix {
            p: self.p,
            rows: self.rows + other.rows,
            cols,
            data,
        })
    }

    pub fn hstack(&self, other: &Self) -> Result<Self> {
        self.check_same_field(other)?;
        if self.rows != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "hstack of heights {} and {}",
                self.rows, other.rows
            )));
        }
        let mut out = Self::zeros(self.p, self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            let row = out.row_mut(r);
            row[..self.cols].copy_from_slice(self.row(r));
            row[self.cols..].copy_from_slice(other.row(r));
        }
        Ok(out)
    }

    /// Reduced row echelon form, keeping the shape (zero rows at the bottom).
    pub fn rref(&self) -> Rref {
        let p = self.p;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut lead = 0;
        for c in 0..m.cols {
            if lead == m.rows {
                break;
            }
            let Some(r) = (lead..m.rows).find(|&r| m.get(r, c) != 0) else {
                continue;
            };
            if r != lead {
                for k in 0..m.cols {
                    m.data.swap(r * m.cols + k, lead * m.cols + k);
                }
            }
            let inv = scalar::inv(m.get(lead, c), p);
            for v in m.row_mut(lead) {
                *v = scalar::mul(*v, inv, p);
            }
            let pivot_row = m.row(lead).to_vec();
            for r2 in 0..m.rows {
                if r2 == lead {
                    continue;
                }
                let f = m.get(r2, c);
                if f == 0 {
                    continue;
                }
                let nf = p - f;
                for (v, &pv) in m.row_mut(r2).iter_mut().zip(&pivot_row).skip(c) {
                    *v = (*v + nf * pv) % p;
                }
            }
            pivots.push(c);
            lead += 1;
        }
        Rref { matrix: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of the right null space `{x : self * x = 0}`, one vector per row.
    pub fn kernel(&self) -> FpMatrix {
        let p = self.p;
        let Rref { matrix, pivots } = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let mut out = Self::zeros(p, free.len(), self.cols);
        for (k, &f) in free.iter().enumerate() {
            out.set(k, f, 1);
            for (r, &pc) in pivots.iter().enumerate() {
                let v = matrix.get(r, f);
                if v != 0 {
                    out.set(k, pc, scalar::neg(v, p));
                }
            }
        }
        out
    }

    /// Basis of the left null space `{y : y * self = 0}`, one vector per row.
    pub fn left_kernel(&self) -> FpMatrix {
        self.transpose().kernel()
    }

    /// Some `x` with `self * x = b`, free variables set to zero; `None` when inconsistent.
    pub fn solve(&self, b: &FpMatrix) -> Result<Option<FpMatrix>> {
        self.check_same_field(b)?;
        if self.rows != b.rows {
            return Err(Error::ShapeMismatch(format!(
                "system has {} equations but right-hand side has {} rows",
                self.rows, b.rows
            )));
        }
        let aug = self.hstack(b)?;
        let Rref { matrix, pivots } = aug.rref();
        if pivots.iter().any(|&c| c >= self.cols) {
            return Ok(None);
        }
        let mut x = Self::zeros(self.p, self.cols, b.cols);
        for (r, &pc) in pivots.iter().enumerate() {
            for k in 0..b.cols {
                x.set(pc, k, matrix.get(r, self.cols + k));
            }
        }
        Ok(Some(x))
    }

    pub fn inverse(&self) -> Option<FpMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let x = self.solve(&Self::identity(self.p, n)).ok()??;
        (self.rank() == n).then_some(x)
    }

    pub fn determinant(&self) -> Option<u64> {
        if self.rows != self.cols {
            return None;
        }
        let p = self.p;
        let n = self.rows;
        let mut m = self.clone();
        let mut det = 1 % p;
        for c in 0..n {
            let Some(r) = (c..n).find(|&r| m.get(r, c) != 0) else {
                return Some(0);
            };
            if r != c {
                for k in 0..n {
                    m.data.swap(r * n + k, c * n + k);
                }
                det = scalar::neg(det, p);
            }
            let pv = m.get(c, c);
            det = scalar::mul(det, pv, p);
            let inv = scalar::inv(pv, p);
            for r2 in c + 1..n {
                let f = scalar::mul(m.get(r2, c), inv, p);
                if f == 0 {
                    continue;
                }
                for k in c..n {
                    let v = scalar::sub(m.get(r2, k), scalar::mul(f, m.get(c, k), p), p);
                    m.set(r2, k, v);
                }
            }
        }
        Some(det)
    }

    /// Some `x` with `x * self = v`, i.e. `v` as a combination of the rows.
    pub fn express_row(&self, v: &[u64]) -> Option<Vec<u64>> {
        assert_eq!(v.len(), self.cols, "vector length");
        if self.rows == 0 {
            return v.iter().all(|&x| x % self.p == 0).then(Vec::new);
        }
        let b = Self::from_row_vectors(self.p, 1, &v.iter().map(|&x| vec![x % self.p]).collect::<Vec<_>>());
        self.transpose()
            .solve(&b)
            .expect("shapes agree")
            .map(|x| x.column(0))
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// Row vector times matrix.
    pub fn apply_row(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.rows, "vector length");
        let p = self.p;
        let mut out = vec![0u64; self.cols];
        for (r, &a) in v.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (o, &b) in out.iter_mut().zip(self.row(r)) {
                *o = (*o + a * b) % p;
            }
        }
        out
    }
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FpMatrix(p={}, {}x{}) [", self.p, self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "{:?}", self.row(r))?;
            if r + 1 < self.rows {
                write!(f, ", ")?;
            }
        }
        write!(f, "]")
    }
}
