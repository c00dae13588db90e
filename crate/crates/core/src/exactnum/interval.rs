//! Closed intervals with dyadic endpoints and outward rounding.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use super::dyadic::Dyadic;
use super::rational::Rational;
use super::NumError;

/// `[lo, hi]` with `lo <= hi`. Arithmetic is exact; `round_out` trades
/// width for smaller endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicInterval {
    lo: Dyadic,
    hi: Dyadic,
}

impl DyadicInterval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Self {
        assert!(lo <= hi, "interval endpoints out of order: [{lo}, {hi}]");
        DyadicInterval { lo, hi }
    }

    pub fn try_new(lo: Dyadic, hi: Dyadic) -> Option<Self> {
        (lo <= hi).then_some(DyadicInterval { lo, hi })
    }

    pub fn point(x: Dyadic) -> Self {
        DyadicInterval { lo: x.clone(), hi: x }
    }

    pub fn zero() -> Self {
        Self::point(Dyadic::zero())
    }

    pub fn one() -> Self {
        Self::point(Dyadic::one())
    }

    /// Tightest enclosure of `q` by multiples of `2^-prec`; exact when `q`
    /// is dyadic.
    pub fn from_rational(q: &Rational, prec: u32) -> Self {
        if let Some(d) = Dyadic::try_from_rational(q) {
            return Self::point(d);
        }
        DyadicInterval {
            lo: Dyadic::floor_rational(q, prec as i64),
            hi: Dyadic::ceil_rational(q, prec as i64),
        }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn width(&self) -> Dyadic {
        &self.hi - &self.lo
    }

    /// `width <= 2^-k`.
    pub fn width_at_most(&self, k: u32) -> bool {
        self.width() <= Dyadic::pow2(-(k as i64))
    }

    pub fn midpoint(&self) -> Dyadic {
        (&self.lo + &self.hi).mul_pow2(-1)
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_rational(&self, q: &Rational) -> bool {
        &self.lo.to_rational() <= q && q <= &self.hi.to_rational()
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Strictly positive lower endpoint.
    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_nonnegative(&self) -> bool {
        !self.lo.is_negative()
    }

    pub fn overlaps(&self, other: &Self) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn subset_of(&self, other: &Self) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Strictly below `other` everywhere.
    pub fn certainly_lt(&self, other: &Self) -> bool {
        self.hi < other.lo
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        Self::try_new(self.lo.greater(&other.lo), self.hi.lesser(&other.hi))
    }

    pub fn hull(&self, other: &Self) -> Self {
        DyadicInterval { lo: self.lo.lesser(&other.lo), hi: self.hi.greater(&other.hi) }
    }

    /// Enclosure of `{|x| : x in self}`.
    pub fn abs(&self) -> Self {
        if self.lo.is_negative() && self.hi.is_positive() {
            DyadicInterval { lo: Dyadic::zero(), hi: self.hi.greater(&self.lo.abs()) }
        } else if self.hi.is_negative() || (self.hi.is_zero() && self.lo.is_negative()) {
            -self
        } else {
            self.clone()
        }
    }

    /// Enclosure of `{x^2}`.
    pub fn square(&self) -> Self {
        let a = self.abs();
        DyadicInterval { lo: a.lo.pow(2), hi: a.hi.pow(2) }
    }

    pub fn min(&self, other: &Self) -> Self {
        DyadicInterval { lo: self.lo.lesser(&other.lo), hi: self.hi.lesser(&other.hi) }
    }

    pub fn max(&self, other: &Self) -> Self {
        DyadicInterval { lo: self.lo.greater(&other.lo), hi: self.hi.greater(&other.hi) }
    }

    pub fn mul_pow2(&self, e: i64) -> Self {
        DyadicInterval { lo: self.lo.mul_pow2(e), hi: self.hi.mul_pow2(e) }
    }

    pub fn mul_dyadic(&self, d: &Dyadic) -> Self {
        let a = &self.lo * d;
        let b = &self.hi * d;
        DyadicInterval { lo: a.lesser(&b), hi: a.greater(&b) }
    }

    /// Rounds endpoints outward to multiples of `2^-prec`.
    pub fn round_out(&self, prec: u32) -> Self {
        DyadicInterval {
            lo: self.lo.floor_to(prec as i64),
            hi: self.hi.ceil_to(prec as i64),
        }
    }

    /// Multiplication by an exact rational, rounded outward at `prec`.
    pub fn mul_rational(&self, q: &Rational, prec: u32) -> Self {
        if let Some(d) = Dyadic::try_from_rational(q) {
            return self.mul_dyadic(&d);
        }
        let a = &self.lo.to_rational() * q;
        let b = &self.hi.to_rational() * q;
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        DyadicInterval {
            lo: Dyadic::floor_rational(&lo, prec as i64),
            hi: Dyadic::ceil_rational(&hi, prec as i64),
        }
    }

    /// Division by a positive integer, rounded outward at `prec`.
    pub fn div_int(&self, d: u64, prec: u32) -> Self {
        let den = Rational::from_integer(d.into());
        DyadicInterval {
            lo: Dyadic::floor_rational(&(self.lo.to_rational() / &den), prec as i64),
            hi: Dyadic::ceil_rational(&(self.hi.to_rational() / &den), prec as i64),
        }
    }

    /// `1 / self` rounded outward at `prec`; `None` when the interval meets zero.
    pub fn recip(&self, prec: u32) -> Option<Self> {
        if self.contains_zero() {
            return None;
        }
        let a = self.hi.to_rational().recip();
        let b = self.lo.to_rational().recip();
        Some(DyadicInterval {
            lo: Dyadic::floor_rational(&a, prec as i64),
            hi: Dyadic::ceil_rational(&b, prec as i64),
        })
    }

    /// Upper endpoint as an exact rational.
    pub fn hi_rational(&self) -> Rational {
        self.hi.to_rational()
    }

    pub fn lo_rational(&self) -> Rational {
        self.lo.to_rational()
    }

    /// Largest absolute value over the interval.
    pub fn magnitude(&self) -> Dyadic {
        self.lo.abs().greater(&self.hi.abs())
    }
}

impl Add for &DyadicInterval {
    type Output = DyadicInterval;
    fn add(self, rhs: &DyadicInterval) -> DyadicInterval {
        DyadicInterval { lo: &self.lo + &rhs.lo, hi: &self.hi + &rhs.hi }
    }
}

impl Sub for &DyadicInterval {
    type Output = DyadicInterval;
    fn sub(self, rhs: &DyadicInterval) -> DyadicInterval {
        DyadicInterval { lo: &self.lo - &rhs.hi, hi: &self.hi - &rhs.lo }
    }
}

impl Mul for &DyadicInterval {
    type Output = DyadicInterval;
    fn mul(self, rhs: &DyadicInterval) -> DyadicInterval {
        let c = [&self.lo * &rhs.lo, &self.lo * &rhs.hi, &self.hi * &rhs.lo, &self.hi * &rhs.hi];
        let lo = c.iter().min().cloned().unwrap_or_else(Dyadic::zero);
        let hi = c.iter().max().cloned().unwrap_or_else(Dyadic::zero);
        DyadicInterval { lo, hi }
    }
}

impl Neg for &DyadicInterval {
    type Output = DyadicInterval;
    fn neg(self) -> DyadicInterval {
        DyadicInterval { lo: -&self.hi, hi: -&self.lo }
    }
}

impl Neg for DyadicInterval {
    type Output = DyadicInterval;
    fn neg(self) -> DyadicInterval {
        -&self
    }
}

impl fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

impl FromStr for DyadicInterval {
    type Err = NumError;

    fn from_str(s: &str) -> Result<Self, NumError> {
        let s = s.trim();
        let inner = s
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| NumError::Parse(format!("interval `{s}` must look like [lo,hi]")))?;
        let (lo, hi) = inner
            .split_once(',')
            .ok_or_else(|| NumError::Parse(format!("interval `{s}` is missing a comma")))?;
        let lo: Dyadic = lo.parse()?;
        let hi: Dyadic = hi.parse()?;
        Self::try_new(lo, hi).ok_or_else(|| NumError::Parse(format!("interval `{s}` has lo > hi")))
    }
}

/// Sum of intervals.
pub fn sum<'a>(items: impl IntoIterator<Item = &'a DyadicInterval>) -> DyadicInterval {
    items.into_iter().fold(DyadicInterval::zero(), |acc, x| &acc + x)
}

/// Number of extra bits needed so that `n` terms each of width `2^-(k+extra)`
/// sum to width at most `2^-k`.
pub fn guard_bits(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}
