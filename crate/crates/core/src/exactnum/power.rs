//! Real powers `x^e` for rational `e`, computed from exact integer roots.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::dyadic::Dyadic;
use super::gaussian::GaussianRational;
use super::interval::DyadicInterval;
use super::rational::{format_rational, parse_rational, pow_u, Rational};
use super::NumError;

/// The exponent `p >= 1` of an `l^p` space, restricted to rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Exponent {
    p: Rational,
}

impl Exponent {
    pub fn new(p: Rational) -> Result<Self, NumError> {
        if p < Rational::one() {
            return Err(NumError::Domain(format!("exponent {} is below 1", format_rational(&p))));
        }
        Ok(Exponent { p })
    }

    pub fn from_ratio(num: i64, den: i64) -> Result<Self, NumError> {
        Self::new(Rational::new(num.into(), den.into()))
    }

    pub fn one() -> Self {
        Exponent { p: Rational::one() }
    }

    pub fn value(&self) -> &Rational {
        &self.p
    }

    /// The conjugate `q` with `1/p + 1/q = 1`; `None` stands for `q = ∞` at `p = 1`.
    pub fn conjugate(&self) -> Option<Rational> {
        if self.p.is_one() {
            None
        } else {
            Some(&self.p / (&self.p - Rational::one()))
        }
    }

    pub fn is_two(&self) -> bool {
        self.p == Rational::from_integer(2.into())
    }

    pub fn is_integer(&self) -> bool {
        self.p.is_integer()
    }

    /// `p / 2`, the power applied to `|z|^2`.
    pub fn half(&self) -> Rational {
        &self.p / Rational::from_integer(2.into())
    }

    pub fn recip(&self) -> Rational {
        self.p.recip()
    }

    /// Smallest integer `>= p`.
    pub fn ceil(&self) -> u32 {
        self.p.ceil().to_integer().to_u32().unwrap_or(u32::MAX)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_rational(&self.p))
    }
}

impl FromStr for Exponent {
    type Err = NumError;
    fn from_str(s: &str) -> Result<Self, NumError> {
        Self::new(parse_rational(s)?)
    }
}

/// Runs `f` at growing working precision until the result has width
/// `<= 2^-k`.
pub fn refine(k: u32, mut f: impl FnMut(u32) -> DyadicInterval) -> DyadicInterval {
    let mut w = k + 8;
    loop {
        let r = f(w);
        if r.width_at_most(k) {
            return r;
        }
        assert!(w < 1 << 20, "precision refinement does not converge");
        w += w / 2 + 16;
    }
}

/// Enclosure of `x^(1/b)` of width `<= 2^-w`, exact when the root is a
/// multiple of `2^-w`.
pub fn root(x: &Dyadic, b: u32, w: u32) -> DyadicInterval {
    assert!(!x.is_negative(), "root of a negative number");
    assert!(b >= 1);
    if x.is_zero() {
        return DyadicInterval::zero();
    }
    let shift = x.exponent() + b as i64 * w as i64;
    let (n, exact) = if shift >= 0 {
        (x.mantissa() << (shift as usize), true)
    } else {
        // the mantissa is odd, so shifting right always drops a one bit
        (x.mantissa() >> ((-shift) as usize), false)
    };
    let y = n.nth_root(b);
    let lower = Dyadic::new(y.clone(), -(w as i64));
    if exact && y.pow(b) == n {
        DyadicInterval::point(lower)
    } else {
        DyadicInterval::new(lower, Dyadic::new(y + BigInt::one(), -(w as i64)))
    }
}

/// Enclosure of `x^e` for dyadic `x >= 0` with width `<= 2^-prec`.
pub fn pow_point(x: &Dyadic, e: &Rational, prec: u32) -> DyadicInterval {
    assert!(!x.is_negative(), "power of a negative base");
    if e.is_zero() {
        return DyadicInterval::one();
    }
    if x.is_zero() {
        assert!(e.is_positive(), "zero raised to a negative power");
        return DyadicInterval::zero();
    }
    let a = e.numer();
    let b = e.denom().to_u32().expect("exponent denominator too large");
    let a_abs = a.abs().to_u32().expect("exponent numerator too large");
    let base = x.pow(a_abs);
    if a.is_positive() {
        return root(&base, b, prec);
    }
    refine(prec, |w| {
        let r = root(&base, b, w + 2 * (1 + (-base.magnitude_bits()).max(0) as u32 / b));
        r.recip(w).expect("positive root has a reciprocal")
    })
}

/// Enclosure of `{x^e : x in xs}` for `xs >= 0`, using monotonicity. The
/// result is at most `2^-prec` wider than the exact range.
pub fn pow_interval(xs: &DyadicInterval, e: &Rational, prec: u32) -> DyadicInterval {
    assert!(xs.is_nonnegative(), "power of an interval reaching below zero");
    if e.is_zero() {
        return DyadicInterval::one();
    }
    let at_lo = pow_point(xs.lo(), e, prec + 1);
    let at_hi = pow_point(xs.hi(), e, prec + 1);
    if e.is_positive() {
        DyadicInterval::new(at_lo.lo().clone(), at_hi.hi().clone())
    } else {
        DyadicInterval::new(at_hi.lo().clone(), at_lo.hi().clone())
    }
}

/// Enclosure of `q^e` for rational `q >= 0` with width `<= 2^-k`.
pub fn pow_rational(q: &Rational, e: &Rational, k: u32) -> DyadicInterval {
    assert!(!q.is_negative(), "power of a negative base");
    if q.is_zero() {
        return if e.is_zero() { DyadicInterval::one() } else { DyadicInterval::zero() };
    }
    if e.is_integer() && !e.is_negative() {
        let n = e.to_integer().to_u32().expect("exponent too large");
        return DyadicInterval::from_rational(&pow_u(q, n), k);
    }
    if let Some(d) = Dyadic::try_from_rational(q) {
        return pow_point(&d, e, k);
    }
    refine(k, |w| pow_interval(&DyadicInterval::from_rational(q, w), e, k + 1))
}

/// Enclosure of `|z|^p` with width `<= 2^-k`.
pub fn abs_pow(z: &GaussianRational, p: &Exponent, k: u32) -> DyadicInterval {
    if z.is_zero() {
        return DyadicInterval::zero();
    }
    if z.im.is_zero() || z.re.is_zero() {
        let v = if z.im.is_zero() { z.re.abs() } else { z.im.abs() };
        return pow_rational(&v, p.value(), k);
    }
    pow_rational(&z.norm_sqr(), &p.half(), k)
}

/// Enclosure of `x^(1/p)` over a nonnegative interval; used to turn
/// `‖f‖_p^p` into `‖f‖_p`.
pub fn pth_root(xs: &DyadicInterval, p: &Exponent, prec: u32) -> DyadicInterval {
    let lo = if xs.lo().is_negative() { Dyadic::zero() } else { xs.lo().clone() };
    pow_interval(&DyadicInterval::new(lo, xs.hi().clone()), &p.recip(), prec)
}
