//! Exact scalars and rigorous real approximation: Gaussian rationals, dyadic
//! intervals with outward rounding, `|z|^p`, `arctan`, and a disk zero finder.

mod arctan;
mod complex_box;
mod dyadic;
mod gaussian;
mod interval;
mod power;
pub mod rational;
mod trig;
mod zero_find;

use thiserror::Error;

pub use arctan::arctan_interval;
pub use complex_box::ComplexBox;
pub use dyadic::Dyadic;
pub use gaussian::GaussianRational;
pub use interval::{guard_bits, sum, DyadicInterval};
pub use power::{abs_pow, pow_interval, pow_point, pow_rational, pth_root, refine, root, Exponent};
pub use rational::Rational;
pub use trig::{sin_cos, tan_bounds};
pub use zero_find::{zero_find, zero_find_with, IntervalFunction, ZeroFindConfig, ZeroFindError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum NumError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("domain error: {0}")]
    Domain(String),
}
