//! Exact numbers: big rationals, costs in `Q ∪ {+∞}`, and program values in
//! `Q ∪ {±∞}`.
//!
//! Rationals are `num_rational::BigRational`, which keeps every value in
//! lowest terms with a positive denominator. The text form used across all
//! file formats is `-?digits(/digits)?` with `inf` for `+∞`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::Error;

pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `-?digits(/digits)?`. Signs on the denominator, whitespace and
/// zero denominators are rejected.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let bad = |why: &str| Error::Parse {
        line: 0,
        message: format!("bad rational `{s}`: {why}"),
    };
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let digits = |p: &str| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit());
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (body, None),
    };
    if !digits(num) {
        return Err(bad("expected digits"));
    }
    let mut numer: BigInt = num.parse().map_err(|_| bad("expected digits"))?;
    if neg {
        numer = -numer;
    }
    let denom: BigInt = match den {
        Some(d) if digits(d) => d.parse().map_err(|_| bad("expected digits"))?,
        Some(_) => return Err(bad("expected digits after '/'")),
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(bad("zero denominator"));
    }
    Ok(Rational::new(numer, denom))
}

pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// A cost: a finite rational or `+∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtendedRational {
    Finite(Rational),
    PlusInfinity,
}

impl ExtendedRational {
    pub fn zero() -> Self {
        ExtendedRational::Finite(Rational::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedRational::Finite(_))
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtendedRational::Finite(q) => Some(q),
            ExtendedRational::PlusInfinity => None,
        }
    }

    /// `w · self` for a nonnegative weight, with `0 · ∞ = 0`.
    pub fn scale(&self, w: &Rational) -> Self {
        debug_assert!(!w.is_negative());
        match self {
            _ if w.is_zero() => ExtendedRational::zero(),
            ExtendedRational::Finite(q) => ExtendedRational::Finite(q * w),
            ExtendedRational::PlusInfinity => ExtendedRational::PlusInfinity,
        }
    }

    pub fn le_rational(&self, u: &Rational) -> bool {
        match self {
            ExtendedRational::Finite(q) => q <= u,
            ExtendedRational::PlusInfinity => false,
        }
    }
}

impl From<Rational> for ExtendedRational {
    fn from(q: Rational) -> Self {
        ExtendedRational::Finite(q)
    }
}

impl Add for ExtendedRational {
    type Output = ExtendedRational;
    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (ExtendedRational::Finite(a), ExtendedRational::Finite(b)) => ExtendedRational::Finite(a + b),
            _ => ExtendedRational::PlusInfinity,
        }
    }
}

impl<'a> Add<&'a ExtendedRational> for ExtendedRational {
    type Output = ExtendedRational;
    fn add(self, rhs: &'a ExtendedRational) -> Self {
        match (self, rhs) {
            (ExtendedRational::Finite(a), ExtendedRational::Finite(b)) => ExtendedRational::Finite(a + b),
            _ => ExtendedRational::PlusInfinity,
        }
    }
}

impl std::iter::Sum for ExtendedRational {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(ExtendedRational::zero(), |acc, x| acc + x)
    }
}

impl fmt::Display for ExtendedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedRational::Finite(q) => f.write_str(&format_rational(q)),
            ExtendedRational::PlusInfinity => f.write_str("inf"),
        }
    }
}

impl FromStr for ExtendedRational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        if s == "inf" {
            Ok(ExtendedRational::PlusInfinity)
        } else {
            parse_rational(s).map(ExtendedRational::Finite)
        }
    }
}

impl Serialize for ExtendedRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Value of a relaxation program. `MinusInfinity` only arises for affine
/// integer programs whose objective is unbounded on the solution lattice.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtendedValue {
    MinusInfinity,
    Finite(Rational),
    PlusInfinity,
}

impl ExtendedValue {
    pub fn le_rational(&self, u: &Rational) -> bool {
        match self {
            ExtendedValue::MinusInfinity => true,
            ExtendedValue::Finite(q) => q <= u,
            ExtendedValue::PlusInfinity => false,
        }
    }

    pub fn cmp_rational(&self, u: &Rational) -> Ordering {
        match self {
            ExtendedValue::MinusInfinity => Ordering::Less,
            ExtendedValue::Finite(q) => q.cmp(u),
            ExtendedValue::PlusInfinity => Ordering::Greater,
        }
    }
}

impl From<ExtendedRational> for ExtendedValue {
    fn from(c: ExtendedRational) -> Self {
        match c {
            ExtendedRational::Finite(q) => ExtendedValue::Finite(q),
            ExtendedRational::PlusInfinity => ExtendedValue::PlusInfinity,
        }
    }
}

impl fmt::Display for ExtendedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedValue::MinusInfinity => f.write_str("-inf"),
            ExtendedValue::Finite(q) => f.write_str(&format_rational(q)),
            ExtendedValue::PlusInfinity => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtendedValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

pub(crate) fn serialize_rational<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(q))
}
