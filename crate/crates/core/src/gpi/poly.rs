//! Multilinear polynomials `sum alpha_pi x_pi(1) ... x_pi(n)`.
//!
//! ```text
//! poly     := ["-"] term (("+" | "-") term)*
//! term     := [INT "*"] monomial
//! monomial := var ("*"? var)*
//! var      := "x" INT
//! ```
//!
//! Every monomial must use each of `x1..xn` exactly once, where `n` is the
//! largest index that occurs.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::Locator;
use crate::linalg::scalar;

/// Largest accepted arity.
pub const MAX_ARITY: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultilinearPoly {
    p: u64,
    arity: usize,
    /// Permutations as 0-based images, nonzero coefficients only.
    coeffs: BTreeMap<Vec<usize>, u64>,
}

fn is_permutation(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    perm.iter().all(|&i| i < perm.len() && !std::mem::replace(&mut seen[i], true))
}

impl MultilinearPoly {
    /// Scales so that the coefficient of the first permutation in lexicographic
    /// order is 1.
    pub fn new(p: u64, arity: usize, terms: impl IntoIterator<Item = (Vec<usize>, u64)>) -> Result<Self> {
        scalar::check_modulus(p)?;
        if arity == 0 || arity > MAX_ARITY {
            return Err(Error::invalid(format!("arity {} outside 1..={}", arity, MAX_ARITY)));
        }
        let mut coeffs: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
        for (perm, c) in terms {
            if perm.len() != arity || !is_permutation(&perm) {
                return Err(Error::invalid(format!("{:?} is not a permutation of 0..{}", perm, arity)));
            }
            let e = coeffs.entry(perm).or_insert(0);
            *e = (*e + c % p) % p;
        }
        coeffs.retain(|_, c| *c != 0);
        let lead = *coeffs
            .values()
            .next()
            .ok_or_else(|| Error::invalid("the zero polynomial has no normalized form"))?;
        let inv = scalar::inv(lead, p);
        for c in coeffs.values_mut() {
            *c = *c * inv % p;
        }
        Ok(MultilinearPoly { p, arity, coeffs })
    }

    /// `x1 x2 ... xn`.
    pub fn monomial(p: u64, arity: usize) -> Result<Self> {
        Self::new(p, arity, [((0..arity).collect(), 1)])
    }

    /// `x1 x2 - x2 x1`.
    pub fn commutator(p: u64) -> Result<Self> {
        Self::new(p, 2, [(vec![0, 1], 1), (vec![1, 0], p - 1)])
    }

    /// `sum sign(pi) x_pi(1) ... x_pi(n)`.
    pub fn standard(p: u64, arity: usize) -> Result<Self> {
        Self::new(p, arity, permutations(arity).into_iter().map(|(perm, odd)| (perm, if odd { p - 1 } else { 1 })))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], u64)> {
        self.coeffs.iter().map(|(k, &v)| (k.as_slice(), v))
    }

    pub fn coefficient(&self, perm: &[usize]) -> u64 {
        self.coeffs.get(perm).copied().unwrap_or(0)
    }

    /// Evaluate on `args` with the supplied multiplication.
    pub fn eval(&self, args: &[Vec<u64>], mul: impl Fn(&[u64], &[u64]) -> Vec<u64>) -> Vec<u64> {
        let n = args[0].len();
        let p = self.p;
        let mut out = vec![0u64; n];
        for (perm, &c) in &self.coeffs {
            let mut acc = args[perm[0]].clone();
            for &j in &perm[1..] {
                acc = mul(&acc, &args[j]);
            }
            for (o, &x) in out.iter_mut().zip(&acc) {
                *o = (*o + c * x) % p;
            }
        }
        out
    }

    pub fn parse(text: &str, p: u64) -> Result<Self> {
        scalar::check_modulus(p)?;
        let loc = Locator { text };
        let bytes = text.as_bytes();
        let mut pos = 0usize;
        let skip = |pos: &mut usize| {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
        };
        let number = |pos: &mut usize| -> Option<(usize, &str)> {
            let start = *pos;
            while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
                *pos += 1;
            }
            (*pos > start).then(|| (start, &text[start..*pos]))
        };
        let mut raw: Vec<(Vec<usize>, u64, usize)> = Vec::new();
        let mut sign = 1u64;
        skip(&mut pos);
        if pos < bytes.len() && bytes[pos] == b'-' {
            sign = p - 1;
            pos += 1;
        }
        loop {
            skip(&mut pos);
            let term_start = pos;
            let mut coeff = 1u64;
            if let Some((at, digits)) = number(&mut pos) {
                let v: u64 = digits.parse().map_err(|_| loc.at(at, "coefficient out of range"))?;
                coeff = v % p;
                skip(&mut pos);
                if pos >= bytes.len() || bytes[pos] != b'*' {
                    return Err(loc.at(pos, "expected '*' after a coefficient"));
                }
                pos += 1;
                skip(&mut pos);
            }
            let mut vars = Vec::new();
            loop {
                skip(&mut pos);
                if pos < bytes.len() && bytes[pos] == b'x' {
                    pos += 1;
                    let (at, digits) = number(&mut pos).ok_or_else(|| loc.at(pos, "expected a variable index"))?;
                    let i: usize = digits.parse().map_err(|_| loc.at(at, "variable index out of range"))?;
                    if i == 0 || i > MAX_ARITY {
                        return Err(loc.at(at, format!("variable index {} outside 1..={}", i, MAX_ARITY)));
                    }
                    vars.push(i - 1);
                    skip(&mut pos);
                    if pos < bytes.len() && bytes[pos] == b'*' {
                        pos += 1;
                        skip(&mut pos);
                        if pos >= bytes.len() || bytes[pos] != b'x' {
                            return Err(loc.at(pos, "expected a variable"));
                        }
                    }
                } else {
                    break;
                }
            }
            if vars.is_empty() {
                return Err(loc.at(pos, "expected a monomial"));
            }
            raw.push((vars, coeff * sign % p, term_start));
            skip(&mut pos);
            if pos >= bytes.len() {
                break;
            }
            match bytes[pos] {
                b'+' => sign = 1,
                b'-' => sign = p - 1,
                _ => return Err(loc.at(pos, "expected '+', '-' or end of input")),
            }
            pos += 1;
        }
        let arity = raw.iter().flat_map(|(v, _, _)| v.iter()).max().map_or(0, |&m| m + 1);
        for (vars, _, at) in &raw {
            if vars.len() != arity || !is_permutation(vars) {
                return Err(loc.at(*at, format!("monomial is not multilinear in x1..x{}", arity)));
            }
        }
        Self::new(p, arity, raw.into_iter().map(|(v, c, _)| (v, c)))
    }

    pub fn to_text(&self) -> String {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .map(|(perm, &c)| {
                let mono = perm.iter().map(|i| format!("x{}", i + 1)).collect::<Vec<_>>().join("*");
                if c == 1 {
                    mono
                } else {
                    format!("{}*{}", c, mono)
                }
            })
            .collect();
        terms.join(" + ")
    }
}

impl std::fmt::Display for MultilinearPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// All permutations of `0..n` in lexicographic order with their parity.
pub fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        out.push((perm.clone(), parity(&perm)));
        // next lexicographic permutation
        let Some(i) = (1..perm.len()).rev().find(|&i| perm[i - 1] < perm[i]) else {
            break;
        };
        let j = (i..perm.len()).rev().find(|&j| perm[j] > perm[i - 1]).expect("successor");
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
    out
}

fn parity(perm: &[usize]) -> bool {
    let mut inv = 0;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inv += 1;
            }
        }
    }
    inv % 2 == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_normalizes_and_round_trips() {
        let f = MultilinearPoly::parse("2*x2 x1 + x1*x2", 3).unwrap();
        assert_eq!(f.arity(), 2);
        assert_eq!(f.coefficient(&[0, 1]), 1);
        assert_eq!(f.coefficient(&[1, 0]), 2);
        assert_eq!(MultilinearPoly::parse(&f.to_text(), 3).unwrap(), f);
        let g = MultilinearPoly::parse("2*x1", 3).unwrap();
        assert_eq!(g.coefficient(&[0]), 1);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(MultilinearPoly::parse("x1 x1", 2).is_err());
        assert!(MultilinearPoly::parse("x1 x2 + x1", 2).is_err());
        assert!(MultilinearPoly::parse("x1 x2 - x1 x2", 2).is_err());
        assert!(MultilinearPoly::parse("", 2).is_err());
        assert!(MultilinearPoly::parse("x0", 2).is_err());
        match MultilinearPoly::parse("x1 + y", 2) {
            Err(Error::Parse { column: 6, .. }) => {}
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn permutation_parities() {
        let all = permutations(3);
        assert_eq!(all.len(), 6);
        assert_eq!(all.iter().filter(|(_, odd)| *odd).count(), 3);
        assert_eq!(all[0].0, vec![0, 1, 2]);
        let s = MultilinearPoly::standard(5, 3).unwrap();
        assert_eq!(s.coefficient(&[1, 0, 2]), 4);
    }
}
