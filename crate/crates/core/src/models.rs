//! Constructors for the standard small algebras used as evaluation models.

use crate::algebra::{unit_vector, AlgebraPresentation};
use crate::error::{Error, Result};
use crate::linalg::FpMatrix;

fn matrix_unit_name(i: usize, j: usize, k: usize) -> String {
    if k < 10 {
        format!("e{}{}", i + 1, j + 1)
    } else {
        format!("e{}_{}", i + 1, j + 1)
    }
}

/// Full matrix algebra `M_k(GF(p))` on matrix units `e_ij`, row-major.
pub fn matrix_algebra(k: usize, p: u64) -> Result<AlgebraPresentation> {
    if k == 0 {
        return Err(Error::invalid("matrix size must be at least 1"));
    }
    let n = k * k;
    let names = (0..n).map(|a| matrix_unit_name(a / k, a % k, k)).collect();
    let mut unit = vec![0u64; n];
    for i in 0..k {
        unit[i * k + i] = 1;
    }
    AlgebraPresentation::from_products(p, names, unit, |a, b| {
        let (i, j) = (a / k, a % k);
        let (l, m) = (b / k, b % k);
        let mut v = vec![0u64; n];
        if j == l {
            v[i * k + m] = 1;
        }
        v
    })
}

/// Upper triangular matrices `T_k(GF(p))` on the units `e_ij`, `i <= j`.
pub fn upper_triangular(k: usize, p: u64) -> Result<AlgebraPresentation> {
    if k == 0 {
        return Err(Error::invalid("matrix size must be at least 1"));
    }
    let pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (i..k).map(move |j| (i, j)))
        .collect();
    let n = pairs.len();
    let index = |i: usize, j: usize| pairs.iter().position(|&q| q == (i, j)).unwrap();
    let names = pairs.iter().map(|&(i, j)| matrix_unit_name(i, j, k)).collect();
    let mut unit = vec![0u64; n];
    for i in 0..k {
        unit[index(i, i)] = 1;
    }
    AlgebraPresentation::from_products(p, names, unit, |a, b| {
        let (i, j) = pairs[a];
        let (l, m) = pairs[b];
        let mut v = vec![0u64; n];
        if j == l {
            v[index(i, m)] = 1;
        }
        v
    })
}

/// Group algebra `GF(p)[G]` from a Cayley table `table[g][h] = gh` on `0..n`.
pub fn group_algebra(p: u64, table: &[Vec<usize>]) -> Result<AlgebraPresentation> {
    let n = table.len();
    if n == 0 {
        return Err(Error::InvalidGroup("empty table".into()));
    }
    for (g, row) in table.iter().enumerate() {
        if row.len() != n {
            return Err(Error::InvalidGroup(format!("row {} has length {}", g, row.len())));
        }
        if let Some(&bad) = row.iter().find(|&&h| h >= n) {
            return Err(Error::InvalidGroup(format!("entry {} out of range", bad)));
        }
    }
    let identity = (0..n)
        .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
        .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
    for g in 0..n {
        for h in 0..n {
            for k in 0..n {
                if table[table[g][h]][k] != table[g][table[h][k]] {
                    return Err(Error::InvalidGroup(format!(
                        "not associative at ({}, {}, {})",
                        g, h, k
                    )));
                }
            }
        }
        if !(0..n).any(|h| table[g][h] == identity) {
            return Err(Error::InvalidGroup(format!("element {} has no inverse", g)));
        }
    }
    let names = (0..n)
        .map(|g| if g == identity { "1".to_string() } else { format!("g{}", g) })
        .collect();
    AlgebraPresentation::from_products(p, names, unit_vector(n, identity), |g, h| {
        unit_vector(n, table[g][h])
    })
    .map_err(|e| Error::InvalidGroup(e.to_string()))
}

/// Cayley table of the cyclic group of order `n`.
pub fn cyclic_table(n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|g| (0..n).map(|h| (g + h) % n).collect()).collect()
}

/// `GF(p)[C_n]` with basis `1, g, g2, ...`.
pub fn cyclic_group_algebra(p: u64, n: usize) -> Result<AlgebraPresentation> {
    let alg = group_algebra(p, &cyclic_table(n))?;
    let names = (0..n).map(power_name("g")).collect();
    Ok(alg.with_names(names))
}

fn power_name(var: &'static str) -> impl Fn(usize) -> String {
    move |s| match s {
        0 => "1".to_string(),
        1 => var.to_string(),
        _ => format!("{}{}", var, s),
    }
}

/// `GF(p)[t]/(t^p)`.
pub fn truncated_poly(p: u64) -> Result<AlgebraPresentation> {
    truncated_poly_deg(p, p as usize)
}

/// `GF(p)[t]/(t^n)` with basis `1, t, ..., t^(n-1)`.
pub fn truncated_poly_deg(p: u64, n: usize) -> Result<AlgebraPresentation> {
    if n == 0 {
        return Err(Error::invalid("truncation degree must be at least 1"));
    }
    let names = (0..n).map(power_name("t")).collect();
    AlgebraPresentation::from_products(p, names, unit_vector(n, 0), |i, j| {
        let mut v = vec![0u64; n];
        if i + j < n {
            v[i + j] = 1;
        }
        v
    })
}

/// Row-acting matrix of `d/dt` on `GF(p)[t]/(t^n)`; requires `n <= p` or `n` a
/// multiple of `p` so that `d(t^n) = 0` is consistent.
pub fn d_dt_matrix(p: u64, n: usize) -> FpMatrix {
    let mut m = FpMatrix::zeros(p, n, n);
    for s in 1..n {
        m.set(s, s - 1, s as u64 % p);
    }
    m
}

/// `M_k(GF(p)[t]/(t^p))` on the basis `e_ij t^s`, index `(i k + j) p + s`,
/// together with the row-acting matrix of `d/dt` applied entrywise.
pub fn matrix_over_truncated(k: usize, p: u64) -> Result<(AlgebraPresentation, FpMatrix)> {
    if k == 0 {
        return Err(Error::invalid("matrix size must be at least 1"));
    }
    let q = p as usize;
    let n = k * k * q;
    let names = (0..n)
        .map(|a| {
            let unit = matrix_unit_name((a / q) / k, (a / q) % k, k);
            match a % q {
                0 => unit,
                1 => format!("{}t", unit),
                s => format!("{}t{}", unit, s),
            }
        })
        .collect();
    let mut unit = vec![0u64; n];
    for i in 0..k {
        unit[(i * k + i) * q] = 1;
    }
    let alg = AlgebraPresentation::from_products(p, names, unit, |a, b| {
        let (ma, s) = (a / q, a % q);
        let (mb, r) = (b / q, b % q);
        let (i, j) = (ma / k, ma % k);
        let (l, m) = (mb / k, mb % k);
        let mut v = vec![0u64; n];
        if j == l && s + r < q {
            v[(i * k + m) * q + s + r] = 1;
        }
        v
    })?;
    let mut d = FpMatrix::zeros(p, n, n);
    for a in 0..n {
        let s = a % q;
        if s > 0 {
            d.set(a, a - 1, s as u64 % p);
        }
    }
    Ok((alg, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_units_multiply() {
        let m = matrix_algebra(2, 2).unwrap();
        let e11 = m.index_of("e11").unwrap();
        let e12 = m.index_of("e12").unwrap();
        assert_eq!(m.basis_product(e11, e12), unit_vector(4, e12));
        assert_eq!(m.basis_product(e12, e11), vec![0; 4]);
        assert_eq!(m.center().dim(), 1);
    }

    #[test]
    fn group_algebra_square_of_one_plus_g() {
        let a = cyclic_group_algebra(2, 2).unwrap();
        assert_eq!(a.mul_coords(&[1, 1], &[1, 1]), vec![0, 0]);
    }

    #[test]
    fn invalid_groups_rejected() {
        assert!(matches!(
            group_algebra(2, &[vec![0, 1], vec![1, 1]]),
            Err(Error::InvalidGroup(_))
        ));
        assert!(matches!(group_algebra(2, &[vec![0, 2]]), Err(Error::InvalidGroup(_))));
        assert!(matches!(
            group_algebra(2, &[vec![1, 0], vec![0, 0]]),
            Err(Error::InvalidGroup(_))
        ));
    }

    #[test]
    fn truncated_over_matrices_dimensions() {
        let (a, d) = matrix_over_truncated(2, 3).unwrap();
        assert_eq!(a.dim(), 12);
        assert_eq!(d.rows(), 12);
        assert_eq!(a.center().dim(), 3);
    }

    #[test]
    fn triangular_has_three_units() {
        let t = upper_triangular(2, 2).unwrap();
        assert_eq!(t.names(), &["e11", "e12", "e22"]);
        assert!(!t.is_commutative());
    }
}
