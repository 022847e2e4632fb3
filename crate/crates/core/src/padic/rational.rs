use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational number in lowest terms with a positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(BigRational);

impl Rational {
    /// Panics if `denominator` is zero.
    pub fn new(numerator: impl Into<BigInt>, denominator: impl Into<BigInt>) -> Self {
        Rational(BigRational::new(numerator.into(), denominator.into()))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    /// `base^exp` for a possibly negative exponent.
    pub fn pow(base: &BigInt, exp: i64) -> Self {
        let magnitude = num_traits::pow(base.clone(), exp.unsigned_abs() as usize);
        if exp >= 0 {
            Rational::from_integer(magnitude)
        } else {
            Rational::new(BigInt::one(), magnitude)
        }
    }

    pub fn as_big_rational(&self) -> &BigRational {
        &self.0
    }

    /// Nearest float, for reporting only.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_integer(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

fn parse_int(token: &str, part: &str) -> Result<BigInt> {
    let digits = part.strip_prefix(['+', '-']).unwrap_or(part);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::InvalidRational {
            token: token.to_string(),
            reason: format!("'{part}' is not an integer"),
        });
    }
    let value: BigInt = digits.parse().expect("ascii digits");
    Ok(if part.starts_with('-') { -value } else { value })
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `a`, `-a` and `a/b`.
    fn from_str(s: &str) -> Result<Self> {
        let token = s.trim();
        match token.split_once('/') {
            None => Ok(Rational::from_integer(parse_int(token, token)?)),
            Some((num, den)) => {
                let num = parse_int(token, num.trim())?;
                let den = parse_int(token, den.trim())?;
                if den.is_zero() {
                    return Err(Error::InvalidRational {
                        token: token.to_string(),
                        reason: "zero denominator".to_string(),
                    });
                }
                Ok(Rational::new(num, den))
            }
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational($trait::$method(&self.0, &rhs.0))
            }
        }
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational($trait::$method(self.0, rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl std::ops::Div for &Rational {
    type Output = Rational;
    /// Panics on division by zero.
    fn div(self, rhs: &Rational) -> Rational {
        Rational(&self.0 / &rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_normalizes() {
        let r: Rational = "6/4".parse().unwrap();
        assert_eq!(r, Rational::new(3, 2));
        assert_eq!(r.to_string(), "3/2");
        assert_eq!("-12".parse::<Rational>().unwrap(), Rational::from(-12));
        assert_eq!("3/-6".parse::<Rational>().unwrap(), Rational::new(-1, 2));
        assert_eq!("0/7".parse::<Rational>().unwrap().to_string(), "0");
        assert_eq!(" 20 ".parse::<Rational>().unwrap(), Rational::from(20));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "a", "1/0", "1/", "/2", "1.5", "--3", "1/2/3"] {
            assert!(bad.parse::<Rational>().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn pow_handles_negative_exponents() {
        let five = BigInt::from(5);
        assert_eq!(Rational::pow(&five, -2), Rational::new(1, 25));
        assert_eq!(Rational::pow(&five, 0), Rational::one());
        assert_eq!(Rational::pow(&five, 3), Rational::from(125));
    }
}
