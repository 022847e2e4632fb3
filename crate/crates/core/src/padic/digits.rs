use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::valuation::split_prime_power;
use super::{Prime, Rational};

/// Truncated p-adic expansion `sum_k digits[k] * p^(leading_exponent + k)`.
///
/// Digits are stored in increasing powers of `p`. Trailing zero digits are
/// dropped, so a terminating expansion is stored exactly; zero has no digits.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PAdicApprox {
    prime: Prime,
    leading_exponent: i64,
    digits: Vec<u64>,
}

impl PAdicApprox {
    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn leading_exponent(&self) -> i64 {
        self.leading_exponent
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    /// Coefficient of `p^position`.
    pub fn digit_at(&self, position: i64) -> u64 {
        let offset = position - self.leading_exponent;
        if offset < 0 {
            return 0;
        }
        self.digits.get(offset as usize).copied().unwrap_or(0)
    }

    /// Exact rational value of the truncated series.
    pub fn value(&self) -> Rational {
        let p = self.prime.to_bigint();
        let mut acc = BigInt::zero();
        for &d in self.digits.iter().rev() {
            acc = acc * &p + BigInt::from(d);
        }
        &Rational::from_integer(acc) * &Rational::pow(&p, self.leading_exponent)
    }

    /// Bracket notation `[d_k...d_0]_p`, most significant digit first.
    ///
    /// `width` pads the integral part with leading zeros to at least that many
    /// positions. Negative positions follow a `.`. For `p > 10` digits are
    /// separated by commas.
    pub fn to_bracket(&self, width: usize) -> String {
        let top = (self.leading_exponent + self.digits.len() as i64 - 1)
            .max(width as i64 - 1)
            .max(0);
        let bottom = self.leading_exponent.min(0);
        let sep = if self.prime.get() > 10 { "," } else { "" };
        let mut out = String::from("[");
        for pos in (bottom..=top).rev() {
            if pos != top && pos != -1 {
                out.push_str(sep);
            }
            if pos == -1 {
                out.push('.');
            }
            out.push_str(&self.digit_at(pos).to_string());
        }
        out.push_str(&format!("]_{}", self.prime));
        out
    }
}

impl fmt::Display for PAdicApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bracket(1))
    }
}

/// For `x = p^m * u / v` (with `p` dividing neither `u` nor `v`) returns `m`
/// and `u * v^(-1) mod p^precision` in `[0, p^precision)`.
pub(crate) fn unit_residue(x: &Rational, p: Prime, precision: u32) -> (i64, BigInt) {
    let (num_exp, u) = split_prime_power(x.numerator(), p);
    let (den_exp, v) = split_prime_power(x.denominator(), p);
    let modulus = p.pow(precision);
    let v_inv = v
        .mod_floor(&modulus)
        .modinv(&modulus)
        .expect("denominator unit is invertible modulo p^k");
    let w = (u * v_inv).mod_floor(&modulus);
    (num_exp - den_exp, w)
}

/// The first `num_digits` p-adic digits of `x`, starting at its valuation.
///
/// The result satisfies `v_p(x - value) >= leading_exponent + num_digits`.
pub fn digits(x: &Rational, p: Prime, num_digits: u32) -> PAdicApprox {
    if x.is_zero() || num_digits == 0 {
        let leading_exponent = if x.is_zero() { 0 } else { unit_residue(x, p, 1).0 };
        return PAdicApprox {
            prime: p,
            leading_exponent,
            digits: Vec::new(),
        };
    }
    let (m, mut w) = unit_residue(x, p, num_digits);
    let pb = p.to_bigint();
    let mut out = Vec::with_capacity(num_digits as usize);
    for _ in 0..num_digits {
        let (q, r) = w.div_mod_floor(&pb);
        out.push(r.to_u64().expect("digit below p"));
        w = q;
    }
    while out.last() == Some(&0) {
        out.pop();
    }
    PAdicApprox {
        prime: p,
        leading_exponent: m,
        digits: out,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::{valuation, Valuation};

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn toy_expansions() {
        let two = Prime::TWO;
        let twenty = digits(&q("20"), two, 7);
        assert_eq!(twenty.leading_exponent(), 2);
        assert_eq!(twenty.digits(), &[1, 0, 1]);
        assert_eq!(twenty.to_bracket(7), "[0010100]_2");

        let three = digits(&q("3"), two, 7);
        assert_eq!(three.leading_exponent(), 0);
        assert_eq!(three.digits(), &[1, 1]);
        assert_eq!(three.to_bracket(7), "[0000011]_2");

        let zero = digits(&q("0"), two, 7);
        assert!(zero.digits().is_empty());
        assert_eq!(zero.to_bracket(7), "[0000000]_2");
    }

    #[test]
    fn negative_and_fractional() {
        let two = Prime::TWO;
        let minus_one = digits(&q("-1"), two, 5);
        assert_eq!(minus_one.digits(), &[1, 1, 1, 1, 1]);
        assert_eq!(valuation(&(&q("-1") - &minus_one.value()), two), Valuation::Finite(5));

        // 1/3 = 1 + 2^1*... in Z_2: 1/3 = ...10101011
        let third = digits(&q("1/3"), two, 8);
        assert_eq!(third.digits(), &[1, 1, 0, 1, 0, 1, 0, 1]);

        let half = digits(&q("3/2"), two, 4);
        assert_eq!(half.leading_exponent(), -1);
        assert_eq!(half.digits(), &[1, 1]);
        assert_eq!(half.to_bracket(1), "[1.1]_2");
    }

    #[test]
    fn large_prime_rendering() {
        let p = Prime::new(11).unwrap();
        let d = digits(&q("120"), p, 3); // 120 = 10 + 10*11
        assert_eq!(d.digits(), &[10, 10]);
        assert_eq!(d.to_bracket(3), "[0,10,10]_11");
    }

    #[test]
    fn zero_digits_requested() {
        let d = digits(&q("12"), Prime::TWO, 0);
        assert_eq!(d.leading_exponent(), 2);
        assert!(d.digits().is_empty());
    }
}
