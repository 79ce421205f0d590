//! Exact real amplitudes of the form `Σ c_i sqrt(r_i)` with rational `c_i` and distinct
//! squarefree radicands `r_i`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest integer whose squarefree part is extracted exactly.
const FACTOR_LIMIT: u128 = u64::MAX as u128;

/// Splits `n` into `(s, r)` with `n = s^2 r` and `r` squarefree.
pub fn squarefree_split(n: u128) -> Result<(u128, u128)> {
    if n > FACTOR_LIMIT {
        return Err(Error::ExactUnsupported(format!("radicand {n} too large to factor")));
    }
    if n == 0 {
        return Ok((0, 1));
    }
    let mut rest = n;
    let (mut square, mut free) = (1u128, 1u128);
    let mut strip = |p: u128, rest: &mut u128| {
        let mut e = 0;
        while *rest % p == 0 {
            *rest /= p;
            e += 1;
        }
        square *= p.pow(e / 2);
        if e % 2 == 1 {
            free *= p;
        }
    };
    strip(2, &mut rest);
    let mut p = 3u128;
    // After removing every prime up to cbrt(n) the cofactor has at most two prime factors.
    while p * p * p <= n && p * p <= rest {
        strip(p, &mut rest);
        p += 2;
    }
    if rest > 1 {
        let root = rest.sqrt();
        if root * root == rest {
            square *= root;
        } else {
            free *= rest;
        }
    }
    Ok((square, free))
}

/// An exact real number `Σ c_i sqrt(r_i)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Surd {
    terms: BTreeMap<u128, BigRational>,
}

impl Surd {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_rational(c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(1, c);
        }
        Self { terms }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// `sqrt(n)`, reduced to squarefree form.
    pub fn sqrt_of(n: u128) -> Result<Self> {
        let (s, r) = squarefree_split(n)?;
        if s == 0 {
            return Ok(Self::zero());
        }
        let mut terms = BTreeMap::new();
        terms.insert(r, BigRational::from_integer(BigInt::from(s)));
        Ok(Self { terms })
    }

    /// `sqrt(q)` for a non-negative rational `q = a/b`, written as `sqrt(a b) / b`.
    pub fn sqrt_of_rational(q: &BigRational) -> Result<Self> {
        if q.is_negative() {
            return Err(Error::ExactUnsupported(format!("square root of negative {q}")));
        }
        let numer = q.numer().to_biguint().unwrap_or_default();
        let denom = q.denom().to_biguint().unwrap_or_default();
        let to_u128 = |n: &BigUint| {
            n.to_u128().ok_or_else(|| Error::ExactUnsupported(format!("integer {n} exceeds 128 bits")))
        };
        let (sa, ra) = squarefree_split(to_u128(&numer)?)?;
        let (sb, rb) = squarefree_split(to_u128(&denom)?)?;
        // sqrt(a/b) = sa sqrt(ra) / (sb sqrt(rb)) = sa sqrt(ra rb) / (sb rb)
        let root = Self::sqrt_radicands(ra, rb)?;
        let scale = BigRational::new(BigInt::from(sa), BigInt::from(sb) * BigInt::from(rb));
        Ok(root.scale(&scale))
    }

    /// `sqrt(a) sqrt(b)` for squarefree `a`, `b`.
    fn sqrt_radicands(a: u128, b: u128) -> Result<Self> {
        let (coeff, radicand) = multiply_radicands(a, b)?;
        let mut terms = BTreeMap::new();
        terms.insert(radicand, BigRational::from_integer(BigInt::from(coeff)));
        Ok(Self { terms })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&u128, &BigRational)> {
        self.terms.iter()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(r, v)| (*r, v * c)).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut sum = self.clone();
        sum.add_assign(other);
        sum
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (r, v) in &other.terms {
            let entry = self.terms.entry(*r).or_insert_with(BigRational::zero);
            *entry += v;
            if entry.is_zero() {
                self.terms.remove(r);
            }
        }
    }

    pub fn neg(&self) -> Self {
        Self { terms: self.terms.iter().map(|(r, v)| (*r, -v)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut acc = Self::zero();
        for (ra, ca) in &self.terms {
            for (rb, cb) in &other.terms {
                let (coeff, radicand) = multiply_radicands(*ra, *rb)?;
                let mut term = BTreeMap::new();
                term.insert(radicand, ca * cb * BigRational::from_integer(BigInt::from(coeff)));
                acc.add_assign(&Self { terms: term });
            }
        }
        Ok(acc)
    }

    /// The value as a rational, if it has no irrational part.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&1).cloned(),
            _ => None,
        }
    }

    /// The square, which must be rational.
    pub fn square(&self) -> Result<BigRational> {
        self.mul(self)?
            .as_rational()
            .ok_or_else(|| Error::ExactUnsupported(format!("square of {self} is irrational")))
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(r, c)| c.to_f64().unwrap_or(f64::NAN) * (*r as f64).sqrt())
            .sum()
    }
}

/// `sqrt(a) sqrt(b) = g sqrt((a/g)(b/g))` for squarefree `a`, `b` with `g = gcd(a, b)`.
fn multiply_radicands(a: u128, b: u128) -> Result<(u128, u128)> {
    let g = a.gcd(&b);
    let radicand = (a / g)
        .checked_mul(b / g)
        .ok_or_else(|| Error::ExactUnsupported(format!("radicand {a} * {b} overflows")))?;
    Ok((g, radicand))
}

impl fmt::Display for Surd {
    /// Terms are written `(a/b)·sqrt(c)` and joined by ` + `; zero is `(0/1)·sqrt(1)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "(0/1)·sqrt(1)");
        }
        for (i, (r, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({}/{})·sqrt({})", c.numer(), c.denom(), r)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn splits() {
        assert_eq!(squarefree_split(72).unwrap(), (6, 2));
        assert_eq!(squarefree_split(1).unwrap(), (1, 1));
        assert_eq!(squarefree_split(49).unwrap(), (7, 1));
        // two large primes above the cube root
        assert_eq!(squarefree_split(1_000_003 * 1_000_033).unwrap(), (1, 1_000_003 * 1_000_033));
        assert_eq!(squarefree_split(1_000_003 * 1_000_003 * 5).unwrap(), (1_000_003, 5));
    }

    #[test]
    fn sqrt_of_two_thirds() {
        let s = Surd::sqrt_of_rational(&rat(2, 3)).unwrap();
        assert_eq!(s.to_string(), "(1/3)·sqrt(6)");
        assert_eq!(s.square().unwrap(), rat(2, 3));
    }

    #[test]
    fn irrational_square_is_reported() {
        let s = Surd::sqrt_of(2).unwrap().add(&Surd::from_integer(1));
        assert!(s.square().is_err());
    }

    #[test]
    fn cancellation_drops_terms() {
        let s = Surd::sqrt_of(8).unwrap();
        let t = Surd::sqrt_of(2).unwrap().scale(&rat(-2, 1));
        assert!(s.add(&t).is_zero());
    }

    proptest! {
        #[test]
        fn split_reconstructs(n in 1u128..5_000_000_000u128) {
            let (s, r) = squarefree_split(n).unwrap();
            prop_assert_eq!(s * s * r, n);
            let (s2, r2) = squarefree_split(r).unwrap();
            prop_assert_eq!((s2, r2), (1, r));
        }

        #[test]
        fn product_of_roots(a in 1u64..100_000, b in 1u64..100_000) {
            let lhs = Surd::sqrt_of(u128::from(a)).unwrap().mul(&Surd::sqrt_of(u128::from(b)).unwrap()).unwrap();
            let rhs = Surd::sqrt_of(u128::from(a) * u128::from(b)).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
