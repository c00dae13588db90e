//! Rectangular enclosures of complex values.

use std::ops::{Add, Mul, Neg, Sub};

use super::dyadic::Dyadic;
use super::gaussian::GaussianRational;
use super::interval::DyadicInterval;

/// `re × im` as a box in the complex plane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexBox {
    pub re: DyadicInterval,
    pub im: DyadicInterval,
}

impl ComplexBox {
    pub fn new(re: DyadicInterval, im: DyadicInterval) -> Self {
        ComplexBox { re, im }
    }

    pub fn point(re: Dyadic, im: Dyadic) -> Self {
        ComplexBox { re: DyadicInterval::point(re), im: DyadicInterval::point(im) }
    }

    pub fn zero() -> Self {
        Self::point(Dyadic::zero(), Dyadic::zero())
    }

    /// Enclosure of an exact Gaussian rational; a point when both parts are dyadic.
    pub fn from_gaussian(z: &GaussianRational, prec: u32) -> Self {
        ComplexBox {
            re: DyadicInterval::from_rational(&z.re, prec),
            im: DyadicInterval::from_rational(&z.im, prec),
        }
    }

    pub fn is_point(&self) -> bool {
        self.re.lo() == self.re.hi() && self.im.lo() == self.im.hi()
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn center(&self) -> (Dyadic, Dyadic) {
        (self.re.midpoint(), self.im.midpoint())
    }

    pub fn center_box(&self) -> ComplexBox {
        let (x, y) = self.center();
        Self::point(x, y)
    }

    /// Exact range of `|z|^2` over the box.
    pub fn abs_sqr(&self) -> DyadicInterval {
        &self.re.square() + &self.im.square()
    }

    /// Larger of the two side lengths.
    pub fn side(&self) -> Dyadic {
        self.re.width().greater(&self.im.width())
    }

    pub fn round_out(&self, prec: u32) -> Self {
        ComplexBox { re: self.re.round_out(prec), im: self.im.round_out(prec) }
    }

    /// Splits into an `n × n` grid, ordered by real part then imaginary part.
    pub fn split(&self, n: u32) -> Vec<ComplexBox> {
        let cuts = |iv: &DyadicInterval| -> Vec<DyadicInterval> {
            let step = iv.width();
            (0..n)
                .map(|i| {
                    let a = iv.lo() + &scale(&step, i, n);
                    let b = iv.lo() + &scale(&step, i + 1, n);
                    DyadicInterval::new(a, b)
                })
                .collect()
        };
        let xs = cuts(&self.re);
        let ys = cuts(&self.im);
        xs.iter()
            .flat_map(|x| ys.iter().map(move |y| ComplexBox::new(x.clone(), y.clone())))
            .collect()
    }

    /// Largest squared distance from `(cx, cy)` to a point of the box.
    pub fn max_dist_sqr(&self, cx: &Dyadic, cy: &Dyadic) -> Dyadic {
        let far = |iv: &DyadicInterval, c: &Dyadic| (iv.lo() - c).abs().greater(&(iv.hi() - c).abs());
        let dx = far(&self.re, cx);
        let dy = far(&self.im, cy);
        &(&dx * &dx) + &(&dy * &dy)
    }
}

/// `d * i / n` for `n` a power of two.
fn scale(d: &Dyadic, i: u32, n: u32) -> Dyadic {
    debug_assert!(n.is_power_of_two());
    (d * &Dyadic::from_int(i as i64)).mul_pow2(-(n.trailing_zeros() as i64))
}

impl Add for &ComplexBox {
    type Output = ComplexBox;
    fn add(self, rhs: &ComplexBox) -> ComplexBox {
        ComplexBox { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub for &ComplexBox {
    type Output = ComplexBox;
    fn sub(self, rhs: &ComplexBox) -> ComplexBox {
        ComplexBox { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul for &ComplexBox {
    type Output = ComplexBox;
    fn mul(self, rhs: &ComplexBox) -> ComplexBox {
        ComplexBox {
            re: &(&self.re * &rhs.re) - &(&self.im * &rhs.im),
            im: &(&self.re * &rhs.im) + &(&self.im * &rhs.re),
        }
    }
}

impl Neg for &ComplexBox {
    type Output = ComplexBox;
    fn neg(self) -> ComplexBox {
        ComplexBox { re: -&self.re, im: -&self.im }
    }
}
