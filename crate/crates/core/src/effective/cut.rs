use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::stage::{SharedEnumeration, StageCursor, StageEnumeration};
use super::EffectiveError;
use crate::exactnum::rational::{self, format_rational, parse_rational, pow2};
use crate::exactnum::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    /// True when `a` is a strictly better witness than `b` on this side.
    pub fn improves(self, a: &Rational, b: &Rational) -> bool {
        let ord = rational::cmp(a, b);
        match self {
            Side::Left => ord.is_gt(),
            Side::Right => ord.is_lt(),
        }
    }

    /// True when `q` lies strictly on this side of `x`.
    pub fn strictly(self, q: &Rational, x: &Rational) -> bool {
        let ord = rational::cmp(q, x);
        match self {
            Side::Left => ord.is_lt(),
            Side::Right => ord.is_gt(),
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

/// An enumeration of one Dedekind cut of a real.
///
/// Emitted rationals are witnesses: the enumerated cut is the set of
/// rationals on the far side of some witness, `q <= w` for a left cut and
/// `q >= w` for a right cut.
#[derive(Clone)]
pub struct CutEnumerator {
    pub side: Side,
    pub stream: SharedEnumeration<Rational>,
}

impl CutEnumerator {
    pub fn new(side: Side, stream: SharedEnumeration<Rational>) -> Self {
        CutEnumerator { side, stream }
    }

    /// The cut of an exact rational: `x ∓ 2^-s` at stage `s`.
    pub fn rational(side: Side, x: Rational) -> Self {
        CutEnumerator::new(side, Arc::new(RationalCut { side, x: Arc::new(x) }))
    }

    pub fn cursor(&self) -> Box<dyn StageCursor<Rational>> {
        self.stream.cursor()
    }

    /// The best witness over stages `0..=s`.
    pub fn best_by(&self, s: usize) -> Result<Option<Rational>, EffectiveError> {
        let mut c = self.cursor();
        let mut best: Option<Rational> = None;
        for _ in 0..=s {
            for q in c.advance()? {
                if best.as_ref().is_none_or(|b| self.side.improves(&q, b)) {
                    best = Some(q);
                }
            }
        }
        Ok(best)
    }

    /// Whether `q` is known to be in the cut by stage `s`.
    pub fn contains_by(&self, q: &Rational, s: usize) -> Result<bool, EffectiveError> {
        Ok(match (self.best_by(s)?, self.side) {
            (None, _) => false,
            (Some(w), Side::Left) => q <= &w,
            (Some(w), Side::Right) => q >= &w,
        })
    }
}

struct RationalCut {
    side: Side,
    x: Arc<Rational>,
}

struct RationalCutCursor {
    side: Side,
    x: Arc<Rational>,
    stage: usize,
}

impl StageEnumeration<Rational> for RationalCut {
    fn cursor(&self) -> Box<dyn StageCursor<Rational>> {
        Box::new(RationalCutCursor { side: self.side, x: self.x.clone(), stage: 0 })
    }
}

impl StageCursor<Rational> for RationalCutCursor {
    fn stage(&self) -> usize {
        self.stage
    }

    fn advance(&mut self) -> Result<Vec<Rational>, EffectiveError> {
        let eps = pow2(-(self.stage as i64));
        self.stage += 1;
        Ok(vec![match self.side {
            Side::Left => &*self.x - eps,
            Side::Right => &*self.x + eps,
        }])
    }
}

/// A uniform family `n ↦ cut of r_n`.
pub type CutFamily = Arc<dyn Fn(usize) -> CutEnumerator + Send + Sync>;

/// Family of exact rational cuts; members past the list are zero.
pub fn rational_family(side: Side, values: Vec<Rational>) -> CutFamily {
    Arc::new(move |n| CutEnumerator::rational(side, values.get(n).cloned().unwrap_or_default()))
}

/// An element `(n, q)` of a join.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct JoinItem {
    pub member: usize,
    pub value: Rational,
}

impl fmt::Display for JoinItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.member, format_rational(&self.value))
    }
}

impl FromStr for JoinItem {
    type Err = EffectiveError;

    fn from_str(s: &str) -> Result<Self, EffectiveError> {
        let bad = || EffectiveError::Parse(format!("join item `{s}` must be (n,num/den)"));
        let inner = s.trim().strip_prefix('(').and_then(|t| t.strip_suffix(')')).ok_or_else(bad)?;
        let (n, q) = inner.split_once(',').ok_or_else(bad)?;
        Ok(JoinItem {
            member: n.trim().parse().map_err(|_| bad())?,
            value: parse_rational(q.trim()).map_err(|_| bad())?,
        })
    }
}

/// The join `{(n, q) : q emitted for r_n}`. Stage `s = ⟨n, t⟩` (Cantor
/// pairing) runs stage `t` of member `n`.
pub fn join(family: CutFamily) -> SharedEnumeration<JoinItem> {
    Arc::new(Join { family })
}

/// Stage of the join at which member `n` runs its own stage `t`.
pub fn join_stage(n: usize, t: usize) -> usize {
    let w = n + t;
    w * (w + 1) / 2 + n
}

struct Join {
    family: CutFamily,
}

struct JoinCursor {
    family: CutFamily,
    members: Vec<Box<dyn StageCursor<Rational>>>,
    diagonal: usize,
    offset: usize,
    stage: usize,
}

impl StageEnumeration<JoinItem> for Join {
    fn cursor(&self) -> Box<dyn StageCursor<JoinItem>> {
        Box::new(JoinCursor { family: self.family.clone(), members: Vec::new(), diagonal: 0, offset: 0, stage: 0 })
    }
}

impl StageCursor<JoinItem> for JoinCursor {
    fn stage(&self) -> usize {
        self.stage
    }

    fn advance(&mut self) -> Result<Vec<JoinItem>, EffectiveError> {
        let n = self.offset;
        if n == self.members.len() {
            self.members.push((self.family)(n).cursor());
        }
        let items = self.members[n].advance()?;
        self.stage += 1;
        if self.offset == self.diagonal {
            self.diagonal += 1;
            self.offset = 0;
        } else {
            self.offset += 1;
        }
        Ok(items.into_iter().map(|value| JoinItem { member: n, value }).collect())
    }
}

/// Wraps a cut so that every emission is checked against a known target.
pub fn attach_target(c: &CutEnumerator, target: Rational) -> CutEnumerator {
    CutEnumerator::new(c.side, Arc::new(Checked { inner: c.clone(), target: Arc::new(target) }))
}

struct Checked {
    inner: CutEnumerator,
    target: Arc<Rational>,
}

struct CheckedCursor {
    side: Side,
    inner: Box<dyn StageCursor<Rational>>,
    target: Arc<Rational>,
}

impl StageEnumeration<Rational> for Checked {
    fn cursor(&self) -> Box<dyn StageCursor<Rational>> {
        Box::new(CheckedCursor { side: self.inner.side, inner: self.inner.cursor(), target: self.target.clone() })
    }
}

impl StageCursor<Rational> for CheckedCursor {
    fn stage(&self) -> usize {
        self.inner.stage()
    }

    fn advance(&mut self) -> Result<Vec<Rational>, EffectiveError> {
        let stage = self.inner.stage();
        let items = self.inner.advance()?;
        if let Some(q) = items.iter().find(|q| !self.side.strictly(q, &self.target)) {
            return Err(EffectiveError::SoundnessViolation { value: q.clone(), stage });
        }
        Ok(items)
    }
}
