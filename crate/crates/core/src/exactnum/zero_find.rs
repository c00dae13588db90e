//! Locating the unique zero of an interval-evaluable function on a closed disk.

use thiserror::Error;

use super::complex_box::ComplexBox;
use super::dyadic::Dyadic;
use super::gaussian::GaussianRational;
use super::rational::{ceil_log2, Rational};

/// A complex function with an interval extension: `eval` must return a box
/// containing `F(λ)` for every `λ` in `region`.
pub trait IntervalFunction {
    fn eval(&self, region: &ComplexBox, prec: u32) -> ComplexBox;
}

impl<F> IntervalFunction for F
where
    F: Fn(&ComplexBox, u32) -> ComplexBox,
{
    fn eval(&self, region: &ComplexBox, prec: u32) -> ComplexBox {
        self(region, prec)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ZeroFindError {
    /// Every box was excluded; the function has no zero in the disk.
    #[error("no surviving box: the function has no zero in the disk")]
    NoSurvivor,
    #[error("subdivision budget exhausted at depth {depth} with {boxes} surviving boxes")]
    BudgetExceeded { depth: u32, boxes: usize },
}

#[derive(Clone, Debug)]
pub struct ZeroFindConfig {
    /// Subdivision levels before giving up.
    pub max_depth: u32,
    /// Largest number of surviving boxes kept at one level.
    pub max_boxes: usize,
}

impl Default for ZeroFindConfig {
    fn default() -> Self {
        ZeroFindConfig { max_depth: 64, max_boxes: 1 << 16 }
    }
}

const SPLIT: u32 = 4;

/// Returns a point within `2^-k` of the unique zero of `f` on `D(0; radius)`.
pub fn zero_find<F: IntervalFunction + ?Sized>(
    f: &F,
    radius: &Rational,
    k: u32,
) -> Result<GaussianRational, ZeroFindError> {
    zero_find_with(f, radius, k, &ZeroFindConfig::default())
}

pub fn zero_find_with<F: IntervalFunction + ?Sized>(
    f: &F,
    radius: &Rational,
    k: u32,
    config: &ZeroFindConfig,
) -> Result<GaussianRational, ZeroFindError> {
    let r2 = radius * radius;
    let half_side = if radius > &Rational::from_integer(0.into()) { ceil_log2(radius) } else { 0 };
    let extent = Dyadic::pow2(half_side);
    let start = ComplexBox::new(
        super::interval::DyadicInterval::new(-&extent, extent.clone()),
        super::interval::DyadicInterval::new(-&extent, extent.clone()),
    );
    let target = Dyadic::pow2(-2 * k as i64);
    let mut survivors = vec![start];
    for depth in 1..=config.max_depth {
        // boxes at this depth have side 2^(half_side + 1 - 2 depth)
        let side_bits = 2 * depth as i64 - half_side - 1;
        let prec = (side_bits.max(0) as u32) + 10;
        let mut next = Vec::new();
        for b in &survivors {
            for child in b.split(SPLIT) {
                if child.abs_sqr().lo_rational() > r2 {
                    continue;
                }
                if f.eval(&child, prec).contains_zero() {
                    next.push(child);
                }
            }
        }
        if next.is_empty() {
            return Err(ZeroFindError::NoSurvivor);
        }
        if next.len() > config.max_boxes {
            return Err(ZeroFindError::BudgetExceeded { depth, boxes: next.len() });
        }
        let (cx, cy) = next
            .iter()
            .map(ComplexBox::center)
            .min()
            .expect("survivor list is non-empty");
        if next.iter().all(|b| b.max_dist_sqr(&cx, &cy) <= target) {
            return Ok(GaussianRational::new(cx.to_rational(), cy.to_rational()));
        }
        survivors = next;
    }
    Err(ZeroFindError::BudgetExceeded { depth: config.max_depth, boxes: survivors.len() })
}
