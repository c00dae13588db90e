//! Stage-based enumerations, Dedekind cuts, enumeration operators, and the
//! compression of a sequence of reals into one real.

mod compress;
mod cut;
mod operator;
mod stage;
mod sum;

use thiserror::Error;

use crate::exactnum::rational::format_rational;
use crate::exactnum::Rational;

pub use compress::{compress_left_ce, compress_right_ce, BackOperator, CeFamily, Compression};
pub use cut::{attach_target, join, join_stage, rational_family, CutEnumerator, CutFamily, JoinItem, Side};
pub use operator::{apply, monotone_on, run_on_snapshot, EnumerationOperator, OperatorRun, SharedOperator};
pub use stage::{
    format_stages, parse_stages, CachedEnumeration, FnEnumeration, ListEnumeration, SharedEnumeration, StageCursor, StageEnumeration,
};
pub use sum::{standard_modulus, sum_with_modulus, Modulus, SumOperator, SummableSequence, TermTransform};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EffectiveError {
    #[error("emitted {} at stage {stage}, which is not strictly on the declared side of the target", format_rational(value))]
    SoundnessViolation { value: Rational, stage: usize },
    #[error("member {member} emitted {} against bound {}", format_rational(value), format_rational(bound))]
    BoundViolation { member: usize, value: Rational, bound: Rational },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("enumeration source failed: {0}")]
    Source(String),
}
