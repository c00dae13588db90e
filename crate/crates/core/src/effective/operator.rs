use std::sync::Arc;

use super::stage::{SharedEnumeration, StageCursor, StageEnumeration};
use super::EffectiveError;

/// An enumeration operator, run stage by stage against an input
/// enumeration.
pub trait EnumerationOperator<I, O>: Send + Sync {
    fn start(&self) -> Box<dyn OperatorRun<I, O>>;
}

/// One run of an operator; `fresh` holds the input items new at `stage`.
pub trait OperatorRun<I, O>: Send {
    fn step(&mut self, stage: usize, fresh: Vec<I>) -> Result<Vec<O>, EffectiveError>;
}

pub type SharedOperator<I, O> = Arc<dyn EnumerationOperator<I, O>>;

/// The output enumeration of `op` run on `input`.
pub fn apply<I: 'static, O: 'static>(op: SharedOperator<I, O>, input: SharedEnumeration<I>) -> SharedEnumeration<O> {
    Arc::new(Applied { op, input })
}

struct Applied<I, O> {
    op: SharedOperator<I, O>,
    input: SharedEnumeration<I>,
}

struct AppliedCursor<I, O> {
    run: Box<dyn OperatorRun<I, O>>,
    input: Box<dyn StageCursor<I>>,
}

impl<I: 'static, O: 'static> StageEnumeration<O> for Applied<I, O> {
    fn cursor(&self) -> Box<dyn StageCursor<O>> {
        Box::new(AppliedCursor { run: self.op.start(), input: self.input.cursor() })
    }
}

impl<I, O> StageCursor<O> for AppliedCursor<I, O> {
    fn stage(&self) -> usize {
        self.input.stage()
    }

    fn advance(&mut self) -> Result<Vec<O>, EffectiveError> {
        let stage = self.input.stage();
        let fresh = self.input.advance()?;
        self.run.step(stage, fresh)
    }
}

/// Runs `op` for `stages` stages on a fixed finite snapshot presented at
/// stage 0.
pub fn run_on_snapshot<I: Clone, O>(
    op: &(impl EnumerationOperator<I, O> + ?Sized),
    snapshot: &[I],
    stages: usize,
) -> Result<Vec<O>, EffectiveError> {
    let mut run = op.start();
    let mut out = Vec::new();
    for s in 0..stages {
        let fresh = if s == 0 { snapshot.to_vec() } else { Vec::new() };
        out.extend(run.step(s, fresh)?);
    }
    Ok(out)
}

/// Checks monotonicity on one pair of snapshots `small ⊆ large`: every
/// output on `small` must be covered by the outputs on `large` run at
/// least as long.
pub fn monotone_on<I: Clone, O>(
    op: &(impl EnumerationOperator<I, O> + ?Sized),
    small: &[I],
    large: &[I],
    stages: usize,
    covered: impl Fn(&O, &[O]) -> bool,
) -> Result<bool, EffectiveError> {
    let a = run_on_snapshot(op, small, stages)?;
    let b = run_on_snapshot(op, large, stages)?;
    Ok(a.iter().all(|o| covered(o, &b)))
}
