//! Exact rational values and the big-integer combinatorics behind them.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// An arbitrary-precision rational number, always kept in lowest terms.
///
/// Serializes as the string `"<num>/<den>"`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Exact(BigRational);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseExactError {
    #[error("invalid rational literal `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

impl Exact {
    pub fn zero() -> Self {
        Exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Exact(BigRational::one())
    }

    /// Builds `num / den`. Panics if `den` is zero.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        let den = den.into();
        assert!(!den.is_zero(), "Exact::new with zero denominator");
        Exact(BigRational::new(num.into(), den))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Exact(BigRational::from_integer(n.into()))
    }

    pub fn from_biguint(num: BigUint, den: BigUint) -> Self {
        Exact::new(BigInt::from(num), BigInt::from(den))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Exact(self.0.recip()))
        }
    }

    pub fn checked_div(&self, rhs: &Exact) -> Option<Self> {
        if rhs.is_zero() {
            None
        } else {
            Some(Exact(&self.0 / &rhs.0))
        }
    }

    /// Nearest `f64`; handles magnitudes far outside the range of the
    /// numerator and denominator as individual floats.
    pub fn to_f64(&self) -> f64 {
        if let Some(v) = self.0.to_f64() {
            if v.is_finite() && (v != 0.0 || self.is_zero()) {
                return v;
            }
        }
        // Fall back on a scaled division when the direct conversion
        // under- or overflows.
        let num = self.numer().abs();
        let den = self.denom().clone();
        let shift = num.bits() as i64 - den.bits() as i64 - 60;
        let scaled = if shift >= 0 {
            (num >> shift as usize) / den
        } else {
            (num << (-shift) as usize) / den
        };
        let mantissa = scaled.to_f64().unwrap_or(f64::NAN);
        let v = mantissa * 2f64.powi(shift as i32);
        if self.is_negative() {
            -v
        } else {
            v
        }
    }

    /// `floor(self)` as a big integer.
    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn into_inner(self) -> BigRational {
        self.0
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for Exact {
    fn from(r: BigRational) -> Self {
        Exact(r)
    }
}

impl From<u64> for Exact {
    fn from(n: u64) -> Self {
        Exact::from_integer(n)
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl fmt::Debug for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl FromStr for Exact {
    type Err = ParseExactError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let invalid = || ParseExactError::Invalid(s.to_string());
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let num: BigInt = n.parse().map_err(|_| invalid())?;
        let den: BigInt = d.parse().map_err(|_| invalid())?;
        if den.is_zero() {
            return Err(ParseExactError::ZeroDenominator(s.to_string()));
        }
        Ok(Exact::new(num, den))
    }
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<Exact> for Exact {
            type Output = Exact;
            fn $method(self, rhs: Exact) -> Exact {
                Exact(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Exact> for Exact {
            type Output = Exact;
            fn $method(self, rhs: &'a Exact) -> Exact {
                Exact(self.0.$method(&rhs.0))
            }
        }
        impl<'a> $trait<&'a Exact> for &Exact {
            type Output = Exact;
            fn $method(self, rhs: &'a Exact) -> Exact {
                Exact((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<Exact> for &Exact {
            type Output = Exact;
            fn $method(self, rhs: Exact) -> Exact {
                Exact((&self.0).$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Exact {
    type Output = Exact;
    fn neg(self) -> Exact {
        Exact(-self.0)
    }
}

impl Sum for Exact {
    fn sum<I: Iterator<Item = Exact>>(iter: I) -> Exact {
        iter.fold(Exact::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Exact> for Exact {
    fn sum<I: Iterator<Item = &'a Exact>>(iter: I) -> Exact {
        iter.fold(Exact::zero(), |acc, x| acc + x)
    }
}

/// `n!`
pub fn factorial(n: u64) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut c = BigUint::one();
    for i in 0..k {
        c *= n - i;
        c /= i + 1;
    }
    c
}

/// Walks `C(n, k), C(n, k+1), ...` with one small multiply and divide per
/// step.
#[derive(Clone, Debug)]
pub struct BinomialWalk {
    n: u64,
    k: u64,
    current: BigUint,
}

impl BinomialWalk {
    pub fn starting_at(n: u64, k: u64) -> Self {
        BinomialWalk {
            n,
            k,
            current: binomial(n, k),
        }
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn current(&self) -> &BigUint {
        &self.current
    }

    pub fn advance(&mut self) {
        if self.k >= self.n {
            self.current = BigUint::zero();
        } else {
            self.current *= self.n - self.k;
            self.current /= self.k + 1;
        }
        self.k += 1;
    }
}

/// Table of `0!, 1!, ..., n!`.
pub fn factorials(n: u64) -> Vec<BigUint> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut acc = BigUint::one();
    out.push(acc.clone());
    for i in 1..=n {
        acc *= i;
        out.push(acc.clone());
    }
    out
}

/// `lcm(1, 2, ..., n)`, or `None` if it does not fit in a `u128`.
pub fn lcm_up_to(n: u64) -> Option<u128> {
    let mut l: u128 = 1;
    for i in 2..=n as u128 {
        let g = l.gcd(&i);
        l = l.checked_mul(i / g)?;
    }
    Some(l)
}
