use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::cut::{join, CutEnumerator, CutFamily, JoinItem, Side};
use super::operator::{apply, EnumerationOperator, OperatorRun};
use super::EffectiveError;
use crate::exactnum::rational::pow2;
use crate::exactnum::{arctan_interval, Rational};

/// A modulus of summability `f`: `|Σ_{n>=N} r_n| < 2^-k` once `N >= f(k)`.
pub type Modulus = Arc<dyn Fn(u32) -> usize + Send + Sync>;

/// `f(k) = k + 2`, a modulus for any `r_n = 2^-n M^-1 x_n` with `0 <= x_n < M`.
pub fn standard_modulus() -> Modulus {
    Arc::new(|k| k as usize + 2)
}

#[derive(Clone)]
pub struct SummableSequence {
    pub terms: CutFamily,
    pub modulus: Modulus,
}

/// How raw term witnesses become witnesses for the summed terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TermTransform {
    Identity,
    /// `x ↦ 2^-n x / M`.
    Scale(Rational),
    /// `x ↦ 2^-n arctan(x) / 2`.
    Arctan,
}

const ARCTAN_PREC_CAP: u32 = 512;

impl TermTransform {
    pub(crate) fn forward(&self, n: usize, side: Side, q: &Rational) -> Rational {
        match self {
            TermTransform::Identity => q.clone(),
            TermTransform::Scale(m) => q * pow2(-(n as i64)) / m,
            TermTransform::Arctan => {
                let prec = (24 + q.denom().bits() as u32).min(ARCTAN_PREC_CAP);
                let a = arctan_interval(q, prec);
                let end = match side {
                    Side::Left => a.lo_rational(),
                    Side::Right => a.hi_rational(),
                };
                end * pow2(-(n as i64) - 1)
            }
        }
    }
}

/// Enumerates a cut of `Σ r'_n` from the join of the term cuts: with
/// `N₀ >= f(k)`, `Σ_{n<=N₀} w_n ∓ 2^-k` is a witness for the sum.
#[derive(Clone)]
pub struct SumOperator {
    pub side: Side,
    pub modulus: Modulus,
    pub transform: TermTransform,
    /// A member read as the zero term.
    pub skip: Option<usize>,
    /// Left witnesses of the raw terms must stay below this.
    pub bound: Option<Rational>,
}

impl SumOperator {
    pub fn new(side: Side, modulus: Modulus) -> Self {
        SumOperator { side, modulus, transform: TermTransform::Identity, skip: None, bound: None }
    }
}

const MAX_K: u32 = 4096;

/// Signed terms `w_i` and candidates `Σ_{n<=i} w_n − e_i`, with the best
/// candidate kept at the root. A node stores the sum `S` of its segment
/// and the best candidate `B` measured from the segment start, so that
/// `B = max(B_l, S_l + B_r)` and a changed term costs one root path.
///
/// Node values are integers over a shared denominator, so the path update
/// needs no gcds; the denominator grows to cover each new term and is
/// recomputed from the live terms if it gets large.
struct PrefixTree {
    size: usize,
    terms: Vec<Rational>,
    eps: Vec<Option<Rational>>,
    den: BigInt,
    sum: Vec<BigInt>,
    best: Vec<Option<BigInt>>,
}

const DEN_BITS: u64 = 1 << 14;

fn larger(a: Option<BigInt>, b: Option<BigInt>) -> Option<BigInt> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl PrefixTree {
    fn with_capacity(size: usize) -> Self {
        PrefixTree {
            size,
            terms: Vec::new(),
            eps: Vec::new(),
            den: BigInt::one(),
            sum: vec![BigInt::zero(); 2 * size],
            best: vec![None; 2 * size],
        }
    }

    fn len(&self) -> usize {
        self.terms.len()
    }

    fn top(&self) -> Option<Rational> {
        self.best[1].as_ref().map(|b| Rational::new(b.clone(), self.den.clone()))
    }

    fn scaled(&self, q: &Rational) -> BigInt {
        q.numer() * (&self.den / q.denom())
    }

    /// Makes the shared denominator a multiple of `d`.
    fn cover(&mut self, d: &BigInt) {
        if (&self.den % d).is_zero() {
            return;
        }
        let den = self.den.lcm(d);
        if den.bits() > DEN_BITS {
            let mut fresh = BigInt::one();
            for q in self.terms.iter().chain(self.eps.iter().flatten()) {
                fresh = fresh.lcm(q.denom());
            }
            self.den = fresh.lcm(d);
            self.rebuild();
            return;
        }
        let factor = &den / &self.den;
        self.den = den;
        for v in &mut self.sum {
            *v *= &factor;
        }
        for v in self.best.iter_mut().flatten() {
            *v *= &factor;
        }
    }

    fn rebuild(&mut self) {
        let base = self.size;
        for i in 0..self.size {
            let (s, b) = match self.terms.get(i) {
                Some(w) => {
                    let s = self.scaled(w);
                    let b = self.eps[i].as_ref().map(|e| &s - self.scaled(e));
                    (s, b)
                }
                None => (BigInt::zero(), None),
            };
            self.sum[base + i] = s;
            self.best[base + i] = b;
        }
        for node in (1..base).rev() {
            self.pull(node);
        }
    }

    fn pull(&mut self, node: usize) {
        let (l, r) = (2 * node, 2 * node + 1);
        let right = self.best[r].as_ref().map(|b| &self.sum[l] + b);
        self.best[node] = larger(self.best[l].clone(), right);
        self.sum[node] = &self.sum[l] + &self.sum[r];
    }

    fn set(&mut self, i: usize, w: Rational) {
        self.cover(w.denom());
        let mut node = self.size + i;
        let s = self.scaled(&w);
        self.best[node] = self.eps[i].as_ref().map(|e| &s - self.scaled(e));
        self.sum[node] = s;
        self.terms[i] = w;
        while node > 1 {
            node /= 2;
            self.pull(node);
        }
    }

    fn push(&mut self, w: Rational, eps: Option<Rational>) {
        if self.len() == self.size {
            let size = 2 * self.size;
            self.size = size;
            self.sum = vec![BigInt::zero(); 2 * size];
            self.best = vec![None; 2 * size];
            self.rebuild();
        }
        if let Some(e) = &eps {
            self.cover(e.denom());
        }
        self.eps.push(eps);
        self.terms.push(w.clone());
        self.set(self.len() - 1, w);
    }
}

struct SumRun {
    op: SumOperator,
    best: Vec<Option<Rational>>,
    /// Terms of the available initial segment, signed so that larger is better.
    tree: PrefixTree,
    emitted: Option<Rational>,
}

impl EnumerationOperator<JoinItem, Rational> for SumOperator {
    fn start(&self) -> Box<dyn OperatorRun<JoinItem, Rational>> {
        Box::new(SumRun { op: self.clone(), best: Vec::new(), tree: PrefixTree::with_capacity(16), emitted: None })
    }
}

impl SumRun {
    fn slot(&mut self, n: usize) -> &mut Option<Rational> {
        while self.best.len() <= n {
            let m = self.best.len();
            self.best.push(if self.op.skip == Some(m) { Some(Rational::zero()) } else { None });
        }
        &mut self.best[n]
    }

    fn k_for(&self, n0: usize) -> Option<u32> {
        let f = &self.op.modulus;
        if f(0) > n0 {
            return None;
        }
        let mut k = 0;
        while k < MAX_K && f(k + 1) <= n0 {
            k += 1;
        }
        Some(k)
    }

    fn signed(&self, q: Rational) -> Rational {
        match self.op.side {
            Side::Left => q,
            Side::Right => -q,
        }
    }

    fn extend(&mut self) {
        while let Some(Some(w)) = self.best.get(self.tree.len()) {
            let w = self.signed(w.clone());
            let eps = self.k_for(self.tree.len()).map(|k| pow2(-(k as i64)));
            self.tree.push(w, eps);
        }
    }
}

impl OperatorRun<JoinItem, Rational> for SumRun {
    fn step(&mut self, _stage: usize, fresh: Vec<JoinItem>) -> Result<Vec<Rational>, EffectiveError> {
        // make the skipped slot present from the start
        if let Some(s) = self.op.skip {
            self.slot(s);
        }
        for JoinItem { member, value } in fresh {
            if self.op.skip == Some(member) {
                continue;
            }
            if let (Side::Left, Some(m)) = (self.op.side, &self.op.bound) {
                if &value >= m {
                    return Err(EffectiveError::BoundViolation { member, value, bound: m.clone() });
                }
            }
            let w = self.op.transform.forward(member, self.op.side, &value);
            let side = self.op.side;
            let slot = self.slot(member);
            if slot.as_ref().is_none_or(|b| side.improves(&w, b)) {
                *slot = Some(w.clone());
                if member < self.tree.len() {
                    let w = self.signed(w);
                    self.tree.set(member, w);
                }
            }
        }
        self.extend();
        let Some(top) = self.tree.top() else { return Ok(Vec::new()) };
        let c = self.signed(top);
        if self.emitted.as_ref().is_none_or(|e| self.op.side.improves(&c, e)) {
            self.emitted = Some(c.clone());
            Ok(vec![c])
        } else {
            Ok(Vec::new())
        }
    }
}

/// The cut of `Σ r_n` on `side`, together with the reduction that produced it.
pub fn sum_with_modulus(seq: &SummableSequence, side: Side) -> (CutEnumerator, Arc<SumOperator>) {
    let op = Arc::new(SumOperator::new(side, seq.modulus.clone()));
    let cut = CutEnumerator::new(side, apply(op.clone(), join(seq.terms.clone())));
    (cut, op)
}
