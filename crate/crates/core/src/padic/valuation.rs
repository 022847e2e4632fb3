use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Prime, Rational};
use crate::error::{Error, Result};

/// An exponent of `p`, extended by the two infinities.
///
/// `NegInfinity` only arises between a finite point and the point at infinity:
/// the two are joined through the end at infinity, strictly below every finite level.
/// Variant order gives `NegInfinity < Finite(_) < Infinity`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    NegInfinity,
    Finite(i64),
    Infinity,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Valuation::Finite(_))
    }

    /// Sum of valuations (valuation of a product). `None` for `-inf + inf`.
    pub fn checked_add(self, other: Valuation) -> Option<Valuation> {
        use Valuation::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Some(Finite(a + b)),
            (Infinity, NegInfinity) | (NegInfinity, Infinity) => None,
            (Infinity, _) | (_, Infinity) => Some(Infinity),
            (NegInfinity, _) | (_, NegInfinity) => Some(NegInfinity),
        }
    }
}

impl From<i64> for Valuation {
    fn from(v: i64) -> Self {
        Valuation::Finite(v)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::NegInfinity => f.write_str("-inf"),
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => serializer.serialize_i64(*v),
            other => serializer.collect_str(other),
        }
    }
}

impl<'de> Deserialize<'de> for Valuation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Int(v) => Ok(Valuation::Finite(v)),
            Raw::Text(s) => match s.as_str() {
                "inf" => Ok(Valuation::Infinity),
                "-inf" => Ok(Valuation::NegInfinity),
                other => other
                    .parse::<i64>()
                    .map(Valuation::Finite)
                    .map_err(|_| serde::de::Error::custom(format!("invalid valuation '{other}'"))),
            },
        }
    }
}

/// A point of the projective line over the p-adic numbers that we can write down:
/// a rational number or the point at infinity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtendedPoint {
    Finite(Rational),
    Infinity,
}

impl ExtendedPoint {
    pub fn as_finite(&self) -> Option<&Rational> {
        match self {
            ExtendedPoint::Finite(r) => Some(r),
            ExtendedPoint::Infinity => None,
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, ExtendedPoint::Infinity)
    }
}

impl From<Rational> for ExtendedPoint {
    fn from(r: Rational) -> Self {
        ExtendedPoint::Finite(r)
    }
}

impl From<i64> for ExtendedPoint {
    fn from(n: i64) -> Self {
        ExtendedPoint::Finite(Rational::from(n))
    }
}

impl fmt::Display for ExtendedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedPoint::Finite(r) => write!(f, "{r}"),
            ExtendedPoint::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for ExtendedPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(ExtendedPoint::Infinity),
            other => other.parse().map(ExtendedPoint::Finite),
        }
    }
}

impl Serialize for ExtendedPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExtendedPoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Splits `n != 0` as `p^k * u` with `p` not dividing `u`.
pub(crate) fn split_prime_power(n: &BigInt, p: Prime) -> (i64, BigInt) {
    debug_assert!(!n.is_zero());
    let p = p.to_bigint();
    let mut k = 0;
    let mut rest = n.clone();
    loop {
        let (q, r) = rest.div_rem(&p);
        if !r.is_zero() {
            return (k, rest);
        }
        rest = q;
        k += 1;
    }
}

/// The exponent of `p` in `x`; infinite for zero.
pub fn valuation(x: &Rational, p: Prime) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinity;
    }
    let (num, _) = split_prime_power(x.numerator(), p);
    let (den, _) = split_prime_power(x.denominator(), p);
    Valuation::Finite(num - den)
}

/// Exact p-adic absolute value: either zero or `p^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Norm {
    Zero,
    Power { exponent: i64 },
}

impl Norm {
    pub fn value(self, p: Prime) -> Rational {
        match self {
            Norm::Zero => Rational::zero(),
            Norm::Power { exponent } => Rational::pow(&p.to_bigint(), exponent),
        }
    }

    /// Lossy; for display only.
    pub fn to_f64(self, p: Prime) -> f64 {
        match self {
            Norm::Zero => 0.0,
            Norm::Power { exponent } => (p.get() as f64).powf(exponent as f64),
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Norm::Zero => f.write_str("0"),
            Norm::Power { exponent } => write!(f, "p^{exponent}"),
        }
    }
}

/// `|x|_p = p^(-v_p(x))`.
pub fn norm(x: &Rational, p: Prime) -> Norm {
    match valuation(x, p) {
        Valuation::Finite(v) => Norm::Power { exponent: -v },
        _ => Norm::Zero,
    }
}

/// Valuation of `x - y`, with the conventions for the point at infinity.
pub fn pairwise_valuation(x: &ExtendedPoint, y: &ExtendedPoint, p: Prime) -> Valuation {
    match (x, y) {
        (ExtendedPoint::Finite(a), ExtendedPoint::Finite(b)) => valuation(&(a - b), p),
        (ExtendedPoint::Infinity, ExtendedPoint::Infinity) => Valuation::Infinity,
        _ => Valuation::NegInfinity,
    }
}
