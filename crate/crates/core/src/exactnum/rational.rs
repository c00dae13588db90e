//! Helpers for `BigRational`: text format, dyadic rounding and small numeric utilities.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::NumError;

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `2^e` as an exact rational.
pub fn pow2(e: i64) -> Rational {
    if e >= 0 {
        Rational::from_integer(BigInt::one() << (e as usize))
    } else {
        Rational::new(BigInt::one(), BigInt::one() << ((-e) as usize))
    }
}

/// Renders `q` as `num/den` (the denominator is always written).
pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses `num/den` or a bare integer.
pub fn parse_rational(s: &str) -> Result<Rational, NumError> {
    let s = s.trim();
    let bad = || NumError::Parse(format!("invalid rational `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(NumError::Parse(format!("zero denominator in `{s}`")));
            }
            Ok(Rational::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(n))
        }
    }
}

/// `floor(q * 2^prec)`.
pub fn floor_scaled(q: &Rational, prec: i64) -> BigInt {
    let (n, d) = scaled_parts(q, prec);
    n.div_floor(&d)
}

/// `ceil(q * 2^prec)`.
pub fn ceil_scaled(q: &Rational, prec: i64) -> BigInt {
    let (n, d) = scaled_parts(q, prec);
    let (quot, rem) = n.div_mod_floor(&d);
    if rem.is_zero() {
        quot
    } else {
        quot + 1
    }
}

fn scaled_parts(q: &Rational, prec: i64) -> (BigInt, BigInt) {
    if prec >= 0 {
        (q.numer() << (prec as usize), q.denom().clone())
    } else {
        (q.numer().clone(), q.denom() << ((-prec) as usize))
    }
}

/// Smallest `e` with `q <= 2^e`, for `q > 0`.
pub fn ceil_log2(q: &Rational) -> i64 {
    assert!(q.is_positive(), "ceil_log2 of a non-positive rational");
    let n = q.numer().bits() as i64;
    let d = q.denom().bits() as i64;
    // 2^(n-1) <= numer < 2^n and 2^(d-1) <= denom < 2^d
    let mut e = n - d + 1;
    while q <= &pow2(e - 1) {
        e -= 1;
    }
    while q > &pow2(e) {
        e += 1;
    }
    e
}

/// Largest `e` with `2^e <= q`, for `q > 0`.
pub fn floor_log2(q: &Rational) -> i64 {
    let c = ceil_log2(q);
    if pow2(c) == *q {
        c
    } else {
        c - 1
    }
}

/// True when the denominator of `q` is a power of two.
pub fn is_dyadic(q: &Rational) -> bool {
    let d = q.denom();
    d.is_positive() && (d & (d - BigInt::one())).is_zero()
}

pub fn abs(q: &Rational) -> Rational {
    q.abs()
}

/// Compares by cross-multiplication, which is much cheaper than the
/// continued-fraction comparison of `Ratio::cmp` on large terms.
pub fn cmp(a: &Rational, b: &Rational) -> std::cmp::Ordering {
    if a.denom() == b.denom() {
        return a.numer().cmp(b.numer());
    }
    (a.numer() * b.denom()).cmp(&(b.numer() * a.denom()))
}

pub fn max(a: &Rational, b: &Rational) -> Rational {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

/// Integer power `q^n` for `n >= 0`.
pub fn pow_u(q: &Rational, n: u32) -> Rational {
    Rational::new(q.numer().pow(n), q.denom().pow(n))
}

/// An integer `m >= 0` with `q <= m`.
pub fn ceil_nonneg(q: &Rational) -> BigInt {
    let c = q.ceil().to_integer();
    if c.is_negative() {
        BigInt::zero()
    } else {
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-4").unwrap(), int(-4));
        assert_eq!(parse_rational("1/-2").unwrap(), rat(-1, 2));
        assert_eq!(format_rational(&rat(-2, 4)), "-1/2");
        assert_eq!(format_rational(&int(3)), "3/1");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn scaled_rounding() {
        assert_eq!(floor_scaled(&rat(1, 3), 2), BigInt::from(1));
        assert_eq!(ceil_scaled(&rat(1, 3), 2), BigInt::from(2));
        assert_eq!(floor_scaled(&rat(-1, 3), 2), BigInt::from(-2));
        assert_eq!(ceil_scaled(&rat(1, 2), 1), BigInt::from(1));
    }

    #[test]
    fn logs() {
        assert_eq!(ceil_log2(&int(1)), 0);
        assert_eq!(ceil_log2(&int(5)), 3);
        assert_eq!(ceil_log2(&rat(1, 3)), -1);
        assert_eq!(floor_log2(&rat(1, 3)), -2);
        assert_eq!(floor_log2(&int(8)), 3);
        assert!(is_dyadic(&rat(3, 8)));
        assert!(!is_dyadic(&rat(1, 3)));
    }
}
