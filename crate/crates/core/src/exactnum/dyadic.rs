//! Exact dyadic rationals `mantissa * 2^exponent`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, Zero};

use super::rational::{self, Rational};
use super::NumError;

/// A dyadic rational kept in canonical form: the mantissa is odd, or the
/// value is zero with exponent zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

impl Dyadic {
    pub fn new(mantissa: BigInt, exponent: i64) -> Self {
        if mantissa.is_zero() {
            return Self::zero();
        }
        let tz = mantissa.trailing_zeros().unwrap_or(0);
        Dyadic {
            mantissa: mantissa >> (tz as usize),
            exponent: exponent + tz as i64,
        }
    }

    pub fn zero() -> Self {
        Dyadic { mantissa: BigInt::zero(), exponent: 0 }
    }

    pub fn one() -> Self {
        Dyadic { mantissa: BigInt::one(), exponent: 0 }
    }

    pub fn from_int(n: i64) -> Self {
        Self::new(BigInt::from(n), 0)
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Self {
        Dyadic { mantissa: BigInt::one(), exponent: e }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn abs(&self) -> Self {
        Dyadic { mantissa: self.mantissa.abs(), exponent: self.exponent }
    }

    pub fn to_rational(&self) -> Rational {
        &Rational::from_integer(self.mantissa.clone()) * &rational::pow2(self.exponent)
    }

    /// Exact conversion, when the denominator of `q` is a power of two.
    pub fn try_from_rational(q: &Rational) -> Option<Self> {
        if !rational::is_dyadic(q) {
            return None;
        }
        let shift = q.denom().bits() as i64 - 1;
        Some(Self::new(q.numer().clone(), -shift))
    }

    /// Largest multiple of `2^-prec` not above `q`.
    pub fn floor_rational(q: &Rational, prec: i64) -> Self {
        Self::new(rational::floor_scaled(q, prec), -prec)
    }

    /// Smallest multiple of `2^-prec` not below `q`.
    pub fn ceil_rational(q: &Rational, prec: i64) -> Self {
        Self::new(rational::ceil_scaled(q, prec), -prec)
    }

    /// Rounds down to a multiple of `2^-prec`.
    pub fn floor_to(&self, prec: i64) -> Self {
        if self.exponent >= -prec {
            return self.clone();
        }
        let shift = (-prec - self.exponent) as usize;
        // arithmetic shift on BigInt floors toward negative infinity
        Self::new(&self.mantissa >> shift, -prec)
    }

    /// Rounds up to a multiple of `2^-prec`.
    pub fn ceil_to(&self, prec: i64) -> Self {
        -(-self).floor_to(prec)
    }

    pub fn mul_pow2(&self, e: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Dyadic { mantissa: self.mantissa.clone(), exponent: self.exponent + e }
    }

    /// Position of the most significant bit: `2^(msb-1) <= |x| < 2^msb`.
    pub fn magnitude_bits(&self) -> i64 {
        if self.is_zero() {
            i64::MIN / 4
        } else {
            self.mantissa.bits() as i64 + self.exponent
        }
    }

    pub fn lesser(&self, other: &Self) -> Self {
        if self <= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    pub fn greater(&self, other: &Self) -> Self {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    /// Exact integer power.
    pub fn pow(&self, n: u32) -> Self {
        Dyadic {
            mantissa: self.mantissa.pow(n),
            exponent: self.exponent * n as i64,
        }
    }

    fn aligned(a: &Self, b: &Self) -> (BigInt, BigInt, i64) {
        let e = a.exponent.min(b.exponent);
        (
            &a.mantissa << ((a.exponent - e) as usize),
            &b.mantissa << ((b.exponent - e) as usize),
            e,
        )
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = Self::aligned(self, other);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let (a, b, e) = Dyadic::aligned(self, rhs);
        Dyadic::new(a + b, e)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        self + &(-rhs)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mantissa * &rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { mantissa: -&self.mantissa, exponent: self.exponent }
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        -&self
    }
}

impl fmt::Display for Dyadic {
    /// Exact decimal expansion; every dyadic rational has a finite one.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent >= 0 {
            return write!(f, "{}", &self.mantissa << (self.exponent as usize));
        }
        let places = (-self.exponent) as usize;
        let digits = (self.mantissa.abs() * BigInt::from(5).pow(places as u32)).to_string();
        let padded = if digits.len() <= places {
            format!("{}{}", "0".repeat(places + 1 - digits.len()), digits)
        } else {
            digits
        };
        let (int_part, frac_part) = padded.split_at(padded.len() - places);
        let sign = if self.mantissa.sign() == Sign::Minus { "-" } else { "" };
        write!(f, "{sign}{int_part}.{frac_part}")
    }
}

impl FromStr for Dyadic {
    type Err = NumError;

    fn from_str(s: &str) -> Result<Self, NumError> {
        let s = s.trim();
        let bad = || NumError::Parse(format!("invalid dyadic decimal `{s}`"));
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (ip, fp) = body.split_once('.').unwrap_or((body, ""));
        if ip.is_empty() || !ip.bytes().all(|b| b.is_ascii_digit()) || !fp.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: BigInt = format!("{ip}{fp}").parse().map_err(|_| bad())?;
        let q = Rational::new(digits, BigInt::from(10).pow(fp.len() as u32));
        let q = if neg { -q } else { q };
        Dyadic::try_from_rational(&q)
            .ok_or_else(|| NumError::Parse(format!("`{s}` is not a dyadic rational")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::rat;

    #[test]
    fn canonical_form() {
        let d = Dyadic::new(BigInt::from(12), -4);
        assert_eq!(d.mantissa(), &BigInt::from(3));
        assert_eq!(d.exponent(), -2);
        assert_eq!(Dyadic::new(BigInt::zero(), 7), Dyadic::zero());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(Dyadic::new(BigInt::from(3), -2).to_string(), "0.75");
        assert_eq!(Dyadic::new(BigInt::from(-1), -3).to_string(), "-0.125");
        assert_eq!(Dyadic::new(BigInt::from(5), 2).to_string(), "20");
        assert_eq!(Dyadic::new(BigInt::from(13), -1).to_string(), "6.5");
        assert_eq!("-0.125".parse::<Dyadic>().unwrap(), Dyadic::new(BigInt::from(-1), -3));
        assert_eq!("20".parse::<Dyadic>().unwrap(), Dyadic::from_int(20));
        assert!("0.1".parse::<Dyadic>().is_err());
        assert!("1.2.3".parse::<Dyadic>().is_err());
    }

    #[test]
    fn rounding() {
        let third = rat(1, 3);
        let lo = Dyadic::floor_rational(&third, 4);
        let hi = Dyadic::ceil_rational(&third, 4);
        assert_eq!(lo.to_rational(), rat(5, 16));
        assert_eq!(hi.to_rational(), rat(6, 16));
        let x = Dyadic::new(BigInt::from(-7), -3);
        assert_eq!(x.floor_to(1).to_rational(), rat(-1, 1));
        assert_eq!(x.ceil_to(1).to_rational(), rat(-1, 2));
    }

    #[test]
    fn arithmetic() {
        let a = Dyadic::new(BigInt::from(3), -1);
        let b = Dyadic::new(BigInt::from(1), -2);
        assert_eq!((&a + &b).to_rational(), rat(7, 4));
        assert_eq!((&a - &b).to_rational(), rat(5, 4));
        assert_eq!((&a * &b).to_rational(), rat(3, 8));
        assert!(a > b);
        assert_eq!(a.pow(3).to_rational(), rat(27, 8));
    }
}
