use num_traits::{One, Zero};

use super::{LpError, LpVector};
use crate::exactnum::{
    abs_pow, guard_bits, pow_interval, pow_rational, pth_root, refine, ComplexBox, DyadicInterval, Exponent,
    Rational,
};

/// `Σ |f(n)|^p` with width `<= 2^-k`.
pub fn norm_pow(f: &LpVector, p: &Exponent, k: u32) -> DyadicInterval {
    let w = k + guard_bits(f.support_len());
    f.entries().fold(DyadicInterval::zero(), |acc, (_, z)| &acc + &abs_pow(z, p, w))
}

/// `‖f‖_p` with width `<= 2^-k`.
pub fn norm(f: &LpVector, p: &Exponent, k: u32) -> DyadicInterval {
    if f.is_zero() {
        return DyadicInterval::zero();
    }
    refine(k, |w| pth_root(&norm_pow(f, p, w), p, w + 1))
}

/// A rational upper bound for `‖f‖_p`.
pub fn norm_upper(f: &LpVector, p: &Exponent) -> Rational {
    norm(f, p, 8).hi_rational()
}

/// Exact `‖f‖_2^2`.
pub fn norm_sq_exact(f: &LpVector) -> Rational {
    f.entries().map(|(_, z)| z.norm_sqr()).fold(Rational::zero(), |a, b| a + b)
}

/// `σ₀(f,g) = |2(‖f‖^p + ‖g‖^p) − ‖f+g‖^p − ‖f−g‖^p|` with width `<= 2^-k`.
pub fn sigma0(f: &LpVector, g: &LpVector, p: &Exponent, k: u32) -> DyadicInterval {
    let w = k + 3;
    let a = norm_pow(f, p, w);
    let b = norm_pow(g, p, w);
    let c = norm_pow(&(f + g), p, w);
    let d = norm_pow(&(f - g), p, w);
    let two = &a + &b;
    (&(&(&two + &two) - &c) - &d).abs()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Disjointness {
    Disjoint,
    Overlapping,
    /// σ₀ could not be separated from zero at this precision.
    Undecided(u32),
}

pub fn disjointness_test(f: &LpVector, g: &LpVector, p: &Exponent, k: u32) -> Result<Disjointness, LpError> {
    if p.is_two() {
        return Err(LpError::ParallelogramLaw);
    }
    if f.disjoint_from(g) {
        return Ok(Disjointness::Disjoint);
    }
    if sigma0(f, g, p, k).is_positive() {
        Ok(Disjointness::Overlapping)
    } else {
        Ok(Disjointness::Undecided(k))
    }
}

/// True when `σ₀(v, g) > 0` is certified for every `v` with `‖v − u‖_p <= delta`.
///
/// Each of the three terms of σ₀ involving `v` moves by at most
/// `p N^(p-1) delta` where `N` bounds all the norms involved.
pub fn overlaps_near(u: &LpVector, delta: &Rational, g: &LpVector, p: &Exponent, k: u32) -> bool {
    let s = sigma0(u, g, p, k);
    if !s.is_positive() {
        return false;
    }
    let big = norm_upper(u, p) + norm_upper(g, p) + delta;
    let lip = pow_rational(&big, &(p.value() - Rational::one()), 4).hi_rational();
    let margin = Rational::from_integer(4.into()) * p.value() * lip * delta;
    s.lo_rational() > margin
}

/// Per-coordinate σ₀ term `2|a|^p + 2|b|^p − |a+b|^p − |a−b|^p` over boxes.
///
/// The `|a±b|^p` part uses a mean-value form in `a`, intersected with the
/// plain range, so that the enclosure stays tight near flat zeros.
pub fn phi_box(a: &ComplexBox, b: &ComplexBox, p: &Exponent, w: u32) -> DyadicInterval {
    if a.is_point() && a.re.lo().is_zero() && a.im.lo().is_zero() {
        return DyadicInterval::zero();
    }
    if b.is_point() && b.re.lo().is_zero() && b.im.lo().is_zero() {
        return DyadicInterval::zero();
    }
    let half = p.half();
    let pw = |z: &ComplexBox| pow_interval(&z.abs_sqr(), &half, w);
    let abs_a = pw(a);
    let abs_b = pw(b);
    let z1 = a + b;
    let z2 = a - b;
    let naive = &pw(&z1) + &pw(&z2);

    let a0 = a.center_box();
    let s0 = &pw(&(&a0 + b)) + &pw(&(&a0 - b));
    let (g1x, g1y) = gradient(&z1, p, w);
    let (g2x, g2y) = gradient(&z2, p, w);
    let dx = &a.re - &a0.re;
    let dy = &a.im - &a0.im;
    let mv = &(&s0 + &(&(&g1x + &g2x) * &dx)) + &(&(&g1y + &g2y) * &dy);
    let s = naive.intersect(&mv).unwrap_or(naive);

    let two_ab = &abs_a + &abs_b;
    (&(&two_ab + &two_ab) - &s).round_out(w)
}

/// Range of `∇|z|^p = p |z|^(p-2) z` over a box.
fn gradient(z: &ComplexBox, p: &Exponent, w: u32) -> (DyadicInterval, DyadicInterval) {
    let r2 = z.abs_sqr();
    let two = Rational::from_integer(2.into());
    if p.value() >= &two || r2.is_positive() {
        let m = pow_interval(&r2, &((p.value() - &two) / &two), w);
        let gx = (&m * &z.re).mul_rational(p.value(), w).round_out(w);
        let gy = (&m * &z.im).mul_rational(p.value(), w).round_out(w);
        (gx, gy)
    } else {
        // |∇| = p |z|^(p-1) bounds each component
        let m = pow_interval(&r2, &((p.value() - Rational::one()) / &two), w);
        let bound = m.mul_rational(p.value(), w).round_out(w).hi().clone();
        let both = DyadicInterval::new(-&bound, bound);
        (both.clone(), both)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::{int, rat};
    use crate::exactnum::{Dyadic, GaussianRational};

    fn e(n: usize) -> LpVector {
        LpVector::basis(n)
    }

    #[test]
    fn norm_pow_examples() {
        let one = Exponent::one();
        let v = LpVector::from_real([(0, int(2)), (1, int(1))]);
        assert_eq!(norm_pow(&v, &one, 10), DyadicInterval::point(Dyadic::from_int(3)));
        let two = Exponent::from_ratio(2, 1).unwrap();
        assert!(norm_pow(&(&e(0) + &e(1)), &two, 10).contains_rational(&int(2)));
        let w = LpVector::from_entries([(0, GaussianRational::new(int(1), int(1)))]);
        let r = norm_pow(&w, &one, 20);
        assert!(r.width_at_most(20));
        assert!(r.lo_rational() >= rat(141421, 100000) && r.hi_rational() <= rat(141422, 100000));
    }

    #[test]
    fn sigma0_examples() {
        let one = Exponent::one();
        assert_eq!(sigma0(&e(0), &e(1), &one, 10), DyadicInterval::zero());
        assert!(sigma0(&e(0), &e(0), &one, 10).contains_rational(&int(2)));
        let two = Exponent::from_ratio(2, 1).unwrap();
        let f = LpVector::from_real([(0, rat(1, 3)), (4, int(2))]);
        let g = LpVector::from_real([(0, rat(-5, 7)), (1, int(1))]);
        assert!(sigma0(&f, &g, &two, 20).contains_zero());
    }

    #[test]
    fn disjointness_examples() {
        let one = Exponent::one();
        assert_eq!(disjointness_test(&e(0), &e(1), &one, 10), Ok(Disjointness::Disjoint));
        assert_eq!(disjointness_test(&e(0), &(&e(0) - &e(0)), &one, 10), Ok(Disjointness::Disjoint));
        let two = Exponent::from_ratio(2, 1).unwrap();
        assert_eq!(disjointness_test(&e(0), &e(0), &two, 10), Err(LpError::ParallelogramLaw));
        // (e0 + e1)/2 for p = 1, rounded to 2^-20
        let c = rat(524288, 1048576);
        let v = LpVector::from_real([(0, c.clone()), (1, c)]);
        assert_eq!(disjointness_test(&v, &e(0), &one, 10), Ok(Disjointness::Overlapping));
    }

    #[test]
    fn robust_overlap() {
        let p = Exponent::from_ratio(3, 2).unwrap();
        let u = &e(0) + &e(1);
        assert!(overlaps_near(&u, &rat(1, 1 << 12), &e(0), &p, 16));
        assert!(!overlaps_near(&u, &int(1), &e(0), &p, 16));
        assert!(!overlaps_near(&e(1), &rat(1, 1 << 12), &e(0), &p, 16));
    }

    #[test]
    fn phi_box_encloses_point_values() {
        let p = Exponent::from_ratio(3, 1).unwrap();
        let a = ComplexBox::new(
            DyadicInterval::new(Dyadic::from_int(0), Dyadic::pow2(-3)),
            DyadicInterval::new(Dyadic::pow2(-4), Dyadic::pow2(-2)),
        );
        let b = ComplexBox::point(Dyadic::one(), Dyadic::zero());
        let whole = phi_box(&a, &b, &p, 40);
        let corner = phi_box(&ComplexBox::point(Dyadic::pow2(-3), Dyadic::pow2(-4)), &b, &p, 40);
        assert!(corner.subset_of(&whole));
    }
}
