use std::sync::Arc;

use thiserror::Error;

use crate::lpspace::LpVector;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("search budget exhausted: {0}")]
    BudgetExceeded(String),
    #[error("oracle failed: {0}")]
    Failed(String),
}

/// A vector of `l^p` given by rational approximations:
/// `‖approx(k) − v‖_p <= 2^-k`.
pub trait VectorOracle: Send + Sync {
    fn approx(&self, k: u32) -> Result<LpVector, OracleError>;
}

impl<T: VectorOracle + ?Sized> VectorOracle for Arc<T> {
    fn approx(&self, k: u32) -> Result<LpVector, OracleError> {
        (**self).approx(k)
    }
}

impl<T: VectorOracle + ?Sized> VectorOracle for Box<T> {
    fn approx(&self, k: u32) -> Result<LpVector, OracleError> {
        (**self).approx(k)
    }
}

impl<T: VectorOracle + ?Sized> VectorOracle for &T {
    fn approx(&self, k: u32) -> Result<LpVector, OracleError> {
        (**self).approx(k)
    }
}

/// An exactly known vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactOracle(pub LpVector);

impl VectorOracle for ExactOracle {
    fn approx(&self, _k: u32) -> Result<LpVector, OracleError> {
        Ok(self.0.clone())
    }
}

/// Any function of the precision.
pub struct FnOracle<F>(pub F);

impl<F> VectorOracle for FnOracle<F>
where
    F: Fn(u32) -> Result<LpVector, OracleError> + Send + Sync,
{
    fn approx(&self, k: u32) -> Result<LpVector, OracleError> {
        (self.0)(k)
    }
}

pub type SharedOracle = Arc<dyn VectorOracle>;
