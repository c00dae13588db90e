use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::cut::{join, rational_family, CutEnumerator, CutFamily, JoinItem, Side};
use super::operator::{apply, EnumerationOperator, OperatorRun};
use super::stage::{CachedEnumeration, StageCursor};
use super::sum::{standard_modulus, SumOperator, TermTransform};
use super::EffectiveError;
use crate::exactnum::{tan_bounds, Rational};

/// A uniform family of reals `r_n >= 0`: the cuts to preserve (`data`) and
/// effective enumerations of the opposite cuts.
#[derive(Clone)]
pub struct CeFamily {
    pub data: CutFamily,
    pub effective: CutFamily,
}

impl CeFamily {
    /// Exact rational members; members past the list are zero.
    pub fn rational(data_side: Side, values: Vec<Rational>) -> Self {
        CeFamily {
            data: rational_family(data_side, values.clone()),
            effective: rational_family(data_side.opposite(), values),
        }
    }
}

/// The compressed real `r = Σ r'_n` with reductions in both directions.
#[derive(Clone)]
pub struct Compression {
    pub side: Side,
    /// The cut of `r` on `side`.
    pub r: CutEnumerator,
    /// Join of the family's data cuts to the cut of `r`.
    pub fwd: Arc<SumOperator>,
    family: CeFamily,
    transform: TermTransform,
    bound: Option<Rational>,
}

/// Compresses a family of right-c.e. reals, preserving their left cuts.
pub fn compress_right_ce(family: CeFamily, bound: Option<Rational>) -> Result<Compression, EffectiveError> {
    compress(Side::Left, family, bound)
}

/// Compresses a family of left-c.e. reals, preserving their right cuts.
pub fn compress_left_ce(family: CeFamily, bound: Option<Rational>) -> Result<Compression, EffectiveError> {
    compress(Side::Right, family, bound)
}

fn compress(side: Side, family: CeFamily, bound: Option<Rational>) -> Result<Compression, EffectiveError> {
    let transform = match &bound {
        Some(m) if m <= &Rational::zero() => {
            return Err(EffectiveError::BoundViolation { member: 0, value: Rational::zero(), bound: m.clone() })
        }
        Some(m) => TermTransform::Scale(m.clone()),
        None => TermTransform::Arctan,
    };
    let fwd = Arc::new(SumOperator {
        side,
        modulus: standard_modulus(),
        transform: transform.clone(),
        skip: None,
        bound: bound.clone(),
    });
    // every `recover(n)` reads the same run of the sum
    let r = CutEnumerator::new(side, Arc::new(CachedEnumeration::new(&apply(fwd.clone(), join(family.data.clone())))));
    Ok(Compression { side, r, fwd, family, transform, bound })
}

impl Compression {
    /// The reduction from the cut of `r` back to the cut of `r_n`.
    pub fn back(&self, n: usize) -> Arc<BackOperator> {
        let remainder = SumOperator {
            side: self.side.opposite(),
            modulus: standard_modulus(),
            transform: self.transform.clone(),
            skip: Some(n),
            bound: self.bound.clone(),
        };
        let cut = CutEnumerator::new(self.side.opposite(), apply(Arc::new(remainder), join(self.family.effective.clone())));
        Arc::new(BackOperator { n, side: self.side, transform: self.transform.clone(), remainder: cut })
    }

    /// The cut of `r_n` recovered from the cut of `r`.
    pub fn recover(&self, n: usize) -> CutEnumerator {
        self.recover_from(n, &self.r)
    }

    /// `back(n)` run on an arbitrary enumeration of the cut of `r`.
    pub fn recover_from(&self, n: usize, r: &CutEnumerator) -> CutEnumerator {
        CutEnumerator::new(self.side, apply(self.back(n), r.stream.clone()))
    }

    pub fn join_of_data(&self) -> Arc<dyn super::stage::StageEnumeration<JoinItem>> {
        join(self.family.data.clone())
    }
}

/// Subtracts an opposite-side bound for `Σ_{m≠n} r'_m` from each witness
/// for `r`, then undoes the term transform.
pub struct BackOperator {
    n: usize,
    side: Side,
    transform: TermTransform,
    remainder: CutEnumerator,
}

struct BackRun {
    n: usize,
    side: Side,
    transform: TermTransform,
    remainder: Box<dyn StageCursor<Rational>>,
    best_rem: Option<Rational>,
    best_in: Option<Rational>,
    emitted: Option<Rational>,
    /// Working precision for inverting arctan.
    level: u32,
}

impl EnumerationOperator<Rational, Rational> for BackOperator {
    fn start(&self) -> Box<dyn OperatorRun<Rational, Rational>> {
        Box::new(BackRun {
            n: self.n,
            side: self.side,
            transform: self.transform.clone(),
            remainder: self.remainder.cursor(),
            best_rem: None,
            best_in: None,
            emitted: None,
            level: 16,
        })
    }
}

fn keep_best(side: Side, slot: &mut Option<Rational>, items: Vec<Rational>) -> bool {
    let mut changed = false;
    for q in items {
        if slot.as_ref().is_none_or(|b| side.improves(&q, b)) {
            *slot = Some(q);
            changed = true;
        }
    }
    changed
}

impl OperatorRun<Rational, Rational> for BackRun {
    fn step(&mut self, _stage: usize, fresh: Vec<Rational>) -> Result<Vec<Rational>, EffectiveError> {
        let rem = self.remainder.advance()?;
        let a = keep_best(self.side.opposite(), &mut self.best_rem, rem);
        let b = keep_best(self.side, &mut self.best_in, fresh);
        if !(a || b) {
            return Ok(Vec::new());
        }
        let (Some(q), Some(t)) = (&self.best_in, &self.best_rem) else { return Ok(Vec::new()) };
        let y = q - t;
        let scale = BigInt::one() << self.n;
        let w = match &self.transform {
            TermTransform::Identity => Some(y),
            // one reduction for y 2^n M
            TermTransform::Scale(m) => Some(Rational::new(y.numer() * scale * m.numer(), y.denom() * m.denom())),
            TermTransform::Arctan => {
                let z = Rational::new(y.numer() * scale * 2, y.denom().clone());
                if !z.is_positive() || z >= Rational::from_integer(2.into()) {
                    // arctan r_n lies in [0, π/2)
                    return Ok(Vec::new());
                }
                let t = tan_bounds(&z, self.level).map(|b| match self.side {
                    Side::Left => b.lo_rational(),
                    Side::Right => b.hi_rational(),
                });
                let stalled = match (&t, &self.emitted) {
                    (Some(t), Some(e)) => !self.side.improves(t, e),
                    (t, _) => t.is_none(),
                };
                if stalled {
                    self.level = (self.level + 4).min(MAX_LEVEL);
                }
                t
            }
        };
        match w {
            Some(w) if self.emitted.as_ref().is_none_or(|e| self.side.improves(&w, e)) => {
                self.emitted = Some(w.clone());
                Ok(vec![w])
            }
            _ => Ok(Vec::new()),
        }
    }
}

const MAX_LEVEL: u32 = 1024;
