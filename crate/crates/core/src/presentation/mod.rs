//! Presentations of `l^p`, vectors given by precision oracles, linear maps
//! from basis images, and the encoding of a c.e. set into a presentation.

mod encoding;
mod isometry;
mod oracle;

use thiserror::Error;

use crate::effective::EffectiveError;
use crate::lpspace::LpError;

pub use encoding::{
    build_encoding_presentation, dump_presentation, parse_decider_window, CeSetOracle, Decider,
    EncodingPresentation, Presentation, StandardPresentation,
};
pub use isometry::{
    apply_exact, decode_set, extend_linear_map, normalize, oracle_isometry, DecodeConfig, EncodingIsometry,
    IdentityIsometry, IsometryOracle, NormalizedOracle,
};
pub use oracle::{ExactOracle, FnOracle, OracleError, SharedOracle, VectorOracle};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("enumeration is not one-to-one: {element} repeated at stage {stage}")]
    DuplicateEnumeration { element: usize, stage: usize },
    #[error("this direction needs a decider for the set")]
    DeciderMissing,
    #[error("stage budget exceeded: {0}")]
    StageBudgetExceeded(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Effective(#[from] EffectiveError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}
