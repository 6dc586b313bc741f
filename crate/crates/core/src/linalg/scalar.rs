use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Largest supported modulus.
pub const MAX_MODULUS: u64 = 1 << 31;

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub fn check_modulus(p: u64) -> Result<()> {
    if p > MAX_MODULUS || !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(())
}

#[inline]
pub fn add(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub fn sub(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

#[inline]
pub fn mul(a: u64, b: u64, p: u64) -> u64 {
    a * b % p
}

#[inline]
pub fn neg(a: u64, p: u64) -> u64 {
    if a == 0 {
        0
    } else {
        p - a
    }
}

pub fn pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul(acc, base, p);
        }
        base = mul(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse by Fermat; `a` must be nonzero mod `p`.
pub fn inv(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow(a, p - 2, p)
}

/// Reduce a signed integer into `[0, p)`.
pub fn reduce(v: i64, p: u64) -> u64 {
    v.rem_euclid(p as i64) as u64
}

/// An element of the prime field GF(p), carrying its own modulus.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FpScalar {
    value: u64,
    modulus: u64,
}

impl FpScalar {
    pub fn new(value: i64, modulus: u64) -> Result<Self> {
        check_modulus(modulus)?;
        Ok(FpScalar {
            value: reduce(value, modulus),
            modulus,
        })
    }

    /// Caller guarantees `modulus` is prime and `value < modulus`.
    pub(crate) fn from_raw(value: u64, modulus: u64) -> Self {
        debug_assert!(value < modulus);
        FpScalar { value, modulus }
    }

    pub fn zero(modulus: u64) -> Result<Self> {
        Self::new(0, modulus)
    }

    pub fn one(modulus: u64) -> Result<Self> {
        Self::new(1, modulus)
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn same_field(self, other: Self) -> Result<u64> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(self.modulus, other.modulus));
        }
        Ok(self.modulus)
    }

    pub fn try_add(self, other: Self) -> Result<Self> {
        let p = self.same_field(other)?;
        Ok(Self::from_raw(add(self.value, other.value, p), p))
    }

    pub fn try_sub(self, other: Self) -> Result<Self> {
        let p = self.same_field(other)?;
        Ok(Self::from_raw(sub(self.value, other.value, p), p))
    }

    pub fn try_mul(self, other: Self) -> Result<Self> {
        let p = self.same_field(other)?;
        Ok(Self::from_raw(mul(self.value, other.value, p), p))
    }

    pub fn inverse(self) -> Option<Self> {
        (self.value != 0).then(|| Self::from_raw(inv(self.value, self.modulus), self.modulus))
    }

    pub fn pow(self, exp: u64) -> Self {
        Self::from_raw(pow(self.value, exp, self.modulus), self.modulus)
    }
}

impl fmt::Debug for FpScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

impl fmt::Display for FpScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

// The operator impls panic on mismatched moduli; use the `try_*` methods
// when the operands come from untrusted sources.
impl Add for FpScalar {
    type Output = FpScalar;
    fn add(self, rhs: Self) -> Self {
        self.try_add(rhs).expect("GF(p) modulus mismatch")
    }
}

impl Sub for FpScalar {
    type Output = FpScalar;
    fn sub(self, rhs: Self) -> Self {
        self.try_sub(rhs).expect("GF(p) modulus mismatch")
    }
}

impl Mul for FpScalar {
    type Output = FpScalar;
    fn mul(self, rhs: Self) -> Self {
        self.try_mul(rhs).expect("GF(p) modulus mismatch")
    }
}

impl Neg for FpScalar {
    type Output = FpScalar;
    fn neg(self) -> Self {
        Self::from_raw(neg(self.value, self.modulus), self.modulus)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_are_reduced() {
        let a = FpScalar::new(-1, 5).unwrap();
        assert_eq!(a.value(), 4);
        assert_eq!(FpScalar::new(12, 7).unwrap().value(), 5);
    }

    #[test]
    fn rejects_composite_modulus() {
        assert_eq!(FpScalar::new(1, 4), Err(Error::NotPrime(4)));
        assert_eq!(FpScalar::new(1, 1), Err(Error::NotPrime(1)));
    }

    #[test]
    fn mismatched_moduli_rejected() {
        let a = FpScalar::new(1, 5).unwrap();
        let b = FpScalar::new(1, 7).unwrap();
        assert_eq!(a.try_add(b), Err(Error::ModulusMismatch(5, 7)));
        assert!(a.try_mul(b).is_err());
    }

    #[test]
    fn inverse_mod_five() {
        let two = FpScalar::new(2, 5).unwrap();
        assert_eq!(two.inverse().unwrap().value(), 3);
        assert!(FpScalar::new(0, 5).unwrap().inverse().is_none());
    }

    #[test]
    fn large_prime_modulus() {
        let p = 2_147_483_647;
        let a = FpScalar::new(p as i64 - 1, p).unwrap();
        assert_eq!((a * a).value(), 1);
    }
}
