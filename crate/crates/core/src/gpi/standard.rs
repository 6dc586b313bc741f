use serde::Serialize;

use crate::algebra::{unit_vector, AlgebraPresentation};
use crate::error::{Error, Result};

use super::poly::permutations;

/// `S_d(x_1..x_d) = sum sign(pi) x_pi(1) ... x_pi(d)`; `d` counts the
/// indeterminates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StandardIdentityReport {
    pub d: usize,
    pub indeterminates: usize,
    /// The same identity written with one fewer index, `S_(d-1)(x_1..x_d)`.
    pub shifted_subscript: usize,
    pub holds: bool,
    pub witness: Option<Vec<String>>,
    pub value: Option<String>,
}

/// Exhaustive over basis tuples. `S_d` is alternating, so only strictly
/// increasing tuples of distinct basis elements need checking.
pub fn standard_identity_check(a: &AlgebraPresentation, d: usize) -> Result<StandardIdentityReport> {
    if d == 0 || d > 10 {
        return Err(Error::invalid(format!("degree {} outside 1..=10", d)));
    }
    let n = a.dim();
    let p = a.p();
    let perms = permutations(d);
    let mut report = StandardIdentityReport {
        d,
        indeterminates: d,
        shifted_subscript: d - 1,
        holds: true,
        witness: None,
        value: None,
    };
    if d > n {
        return Ok(report);
    }
    let mut idx: Vec<usize> = (0..d).collect();
    loop {
        let mut total = vec![0u64; n];
        for (perm, odd) in &perms {
            let mut acc = unit_vector(n, idx[perm[0]]);
            for &j in &perm[1..] {
                acc = a.mul_coords(&acc, &unit_vector(n, idx[j]));
            }
            let c = if *odd { p - 1 } else { 1 };
            for (o, x) in total.iter_mut().zip(acc) {
                *o = (*o + c * x) % p;
            }
        }
        if total.iter().any(|&c| c != 0) {
            report.holds = false;
            report.witness = Some(idx.iter().map(|&i| a.names()[i].clone()).collect());
            report.value = Some(a.format_coords(&total));
            return Ok(report);
        }
        // next combination
        let Some(i) = (0..d).rev().find(|&i| idx[i] < n - d + i) else {
            return Ok(report);
        };
        idx[i] += 1;
        for j in i + 1..d {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinStandardDegree {
    pub degree: Option<usize>,
    pub dmax: usize,
    pub failures: Vec<StandardIdentityReport>,
}

/// Smallest `d <= dmax` with `S_d` identically zero.
pub fn min_standard_degree(a: &AlgebraPresentation, dmax: usize) -> Result<MinStandardDegree> {
    let mut failures = Vec::new();
    for d in 1..=dmax {
        let r = standard_identity_check(a, d)?;
        if r.holds {
            return Ok(MinStandardDegree {
                degree: Some(d),
                dmax,
                failures,
            });
        }
        failures.push(r);
    }
    Ok(MinStandardDegree {
        degree: None,
        dmax,
        failures,
    })
}
