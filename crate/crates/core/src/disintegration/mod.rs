//! Trees over finite index sequences, disintegrations of `l^p`, chain
//! partitions and their infima, and the isometry degree real.

mod chains;
mod description;
mod partition;
mod reconstruct;
mod tree;

use thiserror::Error;

use crate::effective::EffectiveError;
use crate::exactnum::Rational;
use crate::lpspace::LpError;
use crate::presentation::{OracleError, PresentationError};

pub use chains::{
    chain_infimum_norm, chain_lower_cut, chain_norms, chain_upper_cut, degree_real, exact_norms, recognize_atom,
    ChainConfig, ChainNormOracle, CutPairOracle, ExactReal, NormFamily, RealOracle, Recognition,
};
pub use description::{GeometricTail, NormalForm, TreeNode, VectorDescription};
pub use partition::{build_partition, comp_child, selection_epsilon, ChainPartition, PartitionConfig};
pub use reconstruct::{
    approximate_infimum, norms_from_isometry, reconstruct_isometry, spine_norm, ReconstructConfig,
    ReconstructedIsometry,
};
pub use tree::{dump_tree, epsilon, is_terminal, validate, Disintegration, FiniteDisintegration, Spine};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DisintError {
    #[error("stage budget exceeded: {0}")]
    StageBudgetExceeded(String),
    #[error("chain {chain} did not resolve within budget; best upper bound {best_upper}")]
    ChainBudget { chain: usize, best_upper: Rational },
    #[error("the tree has no chain {0}")]
    NoSuchChain(usize),
    #[error("node {0} is terminal")]
    TerminalNode(TreeNode),
    #[error("invalid disintegration: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Effective(#[from] EffectiveError),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
}
