//! Finitely supported vectors of `l^p`, norms, the disjointness functional
//! σ₀, and the functional `f*` dual to a unit atom.

mod functional;
mod norms;
mod vector;

use thiserror::Error;

use crate::exactnum::ZeroFindError;
use crate::presentation::OracleError;

pub use functional::{
    pairing, subvector_leq, unit_functional_apply, unit_functional_apply_with, AtomCertificate, AtomResidual,
};
pub use norms::{
    disjointness_test, norm, norm_pow, norm_sq_exact, norm_upper, overlaps_near, phi_box, sigma0, Disjointness,
};
pub use vector::LpVector;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("σ₀ vanishes identically for p = 2")]
    ParallelogramLaw,
    #[error("not a unit atom: {0}")]
    NotAnAtom(String),
    #[error("could not separate the norm from zero at precision {k}")]
    NormUndecided { k: u32 },
    #[error(transparent)]
    ZeroFind(#[from] ZeroFindError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}
