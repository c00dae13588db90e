//! Interval enclosures of `arctan` at rational arguments.

use num_traits::{One, Signed, Zero};

use super::dyadic::Dyadic;
use super::interval::DyadicInterval;
use super::power::refine;
use super::rational::{rat, Rational};

/// Enclosure of `arctan(x)` with width `<= 2^-k`.
pub fn arctan_interval(x: &Rational, k: u32) -> DyadicInterval {
    if x.is_zero() {
        return DyadicInterval::zero();
    }
    refine(k, |w| arctan_at(x, w))
}

fn arctan_at(x: &Rational, w: u32) -> DyadicInterval {
    if x.is_negative() {
        return -arctan_at(&-x, w);
    }
    let half = rat(1, 2);
    if *x <= half {
        return series(x, w);
    }
    if *x <= Rational::one() {
        // arctan x = pi/4 + arctan((x - 1)/(x + 1)), |t| < 1/3
        let t = (x - Rational::one()) / (x + Rational::one());
        return &quarter_pi(w) + &series(&t, w);
    }
    // arctan x = pi/2 - arctan(1/x)
    &quarter_pi(w).mul_pow2(1) - &arctan_at(&x.recip(), w)
}

/// `pi/4 = arctan(1/2) + arctan(1/3)`.
fn quarter_pi(w: u32) -> DyadicInterval {
    &series(&rat(1, 2), w) + &series(&rat(1, 3), w)
}

/// Taylor series `sum (-1)^j t^(2j+1)/(2j+1)` for `|t| <= 1/2`, with the
/// truncation error bounded by the first omitted term.
fn series(t: &Rational, w: u32) -> DyadicInterval {
    debug_assert!(t.abs() <= rat(1, 2));
    if t.is_zero() {
        return DyadicInterval::zero();
    }
    let guard = 8 + 2 * (usize::BITS - (w as usize).leading_zeros());
    let wp = w + guard;
    let tt = DyadicInterval::from_rational(t, wp);
    let t2 = tt.square().round_out(wp);
    // |t|^(2N+1) <= 2^-(2N+1) <= 2^-wp
    let terms = (wp as u64).div_ceil(2) as usize + 1;
    let mut power = tt.clone();
    let mut acc = DyadicInterval::zero();
    for j in 0..terms {
        let term = power.div_int(2 * j as u64 + 1, wp);
        acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
        power = (&power * &t2).round_out(wp);
    }
    // the alternating tail is bounded by |t|^(2N+1)/(2N+1) <= 2^-wp
    let eps = Dyadic::pow2(-(wp as i64));
    let tail = DyadicInterval::new(-&eps, eps);
    (&acc + &tail).round_out(w + 2)
}
