//! Interval enclosures of `sin`, `cos` and `tan` at rational arguments.

use num_traits::Signed;

use super::dyadic::Dyadic;
use super::interval::DyadicInterval;
use super::rational::{rat, Rational};

/// Enclosures of `(sin x, cos x)` for `|x| <= 4`, each of width about `2^-w`.
pub fn sin_cos(x: &Rational, w: u32) -> (DyadicInterval, DyadicInterval) {
    assert!(x.abs() <= rat(4, 1), "sin_cos expects |x| <= 4");
    let wp = w + 20;
    let xx = DyadicInterval::from_rational(x, wp);
    // rounding keeps each term about 2^-wp wide, so stop a little above that
    let eps = Dyadic::pow2(-(wp as i64) + 4);
    let mut sin = DyadicInterval::zero();
    let mut cos = DyadicInterval::zero();
    let mut term = DyadicInterval::one();
    let mut n: u64 = 0;
    loop {
        let signed = if (n / 2) % 2 == 0 { term.clone() } else { -&term };
        if n % 2 == 0 {
            cos = &cos + &signed;
        } else {
            sin = &sin + &signed;
        }
        n += 1;
        term = (&term * &xx).div_int(n, wp);
        // past n > 2|x| the terms halve each step, so the tail is below 2 |term|
        if n > 8 && term.magnitude() < eps {
            break;
        }
    }
    let m = term.magnitude().mul_pow2(1);
    let tail = DyadicInterval::new(-&m, m);
    ((&sin + &tail).round_out(w + 2), (&cos + &tail).round_out(w + 2))
}

/// Enclosure of `tan x` on the principal branch, or `None` unless
/// `cos x > 0` is certified at this precision.
pub fn tan_bounds(x: &Rational, w: u32) -> Option<DyadicInterval> {
    let (s, c) = sin_cos(x, w);
    if !c.is_positive() {
        return None;
    }
    let inv = c.recip(w + 4)?;
    Some((&s * &inv).round_out(w))
}
