//! Gaussian rationals `a + b i` with `a, b` rational.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use super::rational::{format_rational, parse_rational, Rational};
use super::NumError;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussianRational { re, im }
    }

    pub fn real(re: Rational) -> Self {
        GaussianRational { re, im: Rational::zero() }
    }

    pub fn zero() -> Self {
        Self::real(Rational::zero())
    }

    pub fn one() -> Self {
        Self::real(Rational::one())
    }

    pub fn i() -> Self {
        GaussianRational { re: Rational::zero(), im: Rational::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussianRational { re: self.re.clone(), im: -&self.im }
    }

    /// `|z|^2 = re^2 + im^2`, exact.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// `|z| = 1` exactly.
    pub fn is_unimodular(&self) -> bool {
        self.norm_sqr().is_one()
    }

    pub fn scale(&self, q: &Rational) -> Self {
        GaussianRational { re: &self.re * q, im: &self.im * q }
    }

    pub fn recip(&self) -> Option<Self> {
        let n = self.norm_sqr();
        if n.is_zero() {
            return None;
        }
        Some(self.conj().scale(&n.recip()))
    }

    /// Upper bound `|re| + |im| >= |z|`.
    pub fn l1_bound(&self) -> Rational {
        self.re.abs() + self.im.abs()
    }
}

impl From<Rational> for GaussianRational {
    fn from(q: Rational) -> Self {
        Self::real(q)
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: -&self.re, im: -&self.im }
    }
}

impl fmt::Display for GaussianRational {
    /// `num/den` for real values, otherwise `num/den+num/den i` (or `-` before
    /// a negative imaginary part).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", format_rational(&self.re));
        }
        let sign = if self.im.is_negative() { '-' } else { '+' };
        write!(f, "{}{}{} i", format_rational(&self.re), sign, format_rational(&self.im.abs()))
    }
}

impl FromStr for GaussianRational {
    type Err = NumError;

    fn from_str(s: &str) -> Result<Self, NumError> {
        let t = s.trim();
        let Some(body) = t.strip_suffix('i') else {
            return Ok(Self::real(parse_rational(t)?));
        };
        let body = body.trim_end();
        // the separator is the last '+' or '-' directly after a digit
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1].is_ascii_digit());
        let Some(i) = split else {
            // a bare imaginary part like `1/2 i`
            return Ok(GaussianRational::new(Rational::zero(), parse_rational(body)?));
        };
        let re = parse_rational(&body[..i])?;
        let im_text = &body[i + 1..];
        let im = parse_rational(im_text)?;
        let im = if bytes[i] == b'-' { -im } else { im };
        Ok(GaussianRational::new(re, im))
    }
}
