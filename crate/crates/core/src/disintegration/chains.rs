use std::sync::Arc;

use num_traits::{Signed, Zero};

use super::description::VectorDescription;
use super::partition::ChainPartition;
use super::tree::{is_terminal, value_of};
use super::DisintError;
use crate::effective::{compress_right_ce, CeFamily, Compression, CutEnumerator, FnEnumeration, Side};
use crate::exactnum::rational::{max, pow2};
use crate::exactnum::{abs_pow, DyadicInterval, Rational};
use crate::lpspace::{AtomCertificate, LpError, LpVector};

#[derive(Clone, Debug)]
pub struct ChainConfig {
    /// Chain nodes visited before giving up.
    pub max_depth: usize,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig { max_depth: 256 }
    }
}

fn precision(k: u32, depth: usize) -> u32 {
    k + 16 + 2 * depth.min(512) as u32
}

/// An enclosure of `‖inf φ[C_n]‖_p` of width `<= 2^-k`. Descends `C_n`
/// until a terminal node, a node of norm below `2^-k`, or a node certified
/// to have a single coordinate carrying most of its mass, which then is the
/// infimum.
pub fn chain_infimum_norm(
    part: &ChainPartition,
    n: usize,
    k: u32,
    config: &ChainConfig,
) -> Result<DyadicInterval, DisintError> {
    let p = part.exponent();
    let phi = part.disintegration();
    let mut node = part.origin(n)?;
    let mut best_upper: Option<Rational> = None;
    for depth in 0..config.max_depth {
        let v = value_of(phi, &node)?;
        if is_terminal(phi, &node) {
            return Ok(v.norm(p, k));
        }
        let w = precision(k, depth);
        let upper = v.norm(p, w).hi_rational();
        if upper < pow2(-(k as i64)) {
            return Ok(DyadicInterval::new(crate::exactnum::Dyadic::zero(), dyadic_ceil(&upper, w)));
        }
        best_upper = Some(best_upper.map_or(upper.clone(), |b| if upper < b { upper.clone() } else { b }));
        if let Some(m) = v.largest_coordinate() {
            let lambda = v.coordinate(m);
            if dominant(part, &node, &v, &lambda, w)? {
                return Ok(abs_pow(&lambda, &crate::exactnum::Exponent::one(), k));
            }
        }
        node = match part.successor(&node) {
            Ok(Some(next)) => next,
            Ok(None) => return Ok(v.norm(p, k)),
            Err(DisintError::StageBudgetExceeded(_)) => break,
            Err(e) => return Err(e),
        };
    }
    Err(DisintError::ChainBudget { chain: n, best_upper: best_upper.unwrap_or_default() })
}

fn dyadic_ceil(q: &Rational, w: u32) -> crate::exactnum::Dyadic {
    crate::exactnum::Dyadic::ceil_rational(q, w as i64)
}

/// `‖φ(ν)‖^p + ε(ν) < 2|λ|^p`, that is `‖φ(ν) − λe_m‖^p + ε(ν) < ‖λe_m‖^p`
/// for the coordinate `λ` at `m`. A terminal node is its own chain's
/// infimum, so there the slack `ε(ν)` is dropped.
pub(crate) fn dominant(
    part: &ChainPartition,
    node: &super::TreeNode,
    v: &VectorDescription,
    lambda: &crate::exactnum::GaussianRational,
    w: u32,
) -> Result<bool, DisintError> {
    if lambda.is_zero() {
        return Ok(false);
    }
    let p = part.exponent();
    let slack = if is_terminal(part.disintegration(), node) {
        Rational::zero()
    } else {
        part.epsilon(node, w)?.hi_rational()
    };
    let lhs = v.norm_pow(p, w).hi_rational() + slack;
    let rhs = abs_pow(lambda, p, w).lo_rational() * Rational::from_integer(2.into());
    Ok(lhs < rhs)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Recognition {
    Found(LpVector),
    Small,
    Undecided,
}

/// Scans `C_n` for a node certifying `inf φ[C_n] = f*(φ(ν)) f`, or one of
/// norm below `2^-k`.
pub fn recognize_atom(
    part: &ChainPartition,
    n: usize,
    f: &AtomCertificate,
    k: u32,
    config: &ChainConfig,
) -> Result<Recognition, DisintError> {
    let p = part.exponent();
    if p.is_two() {
        return Err(LpError::ParallelogramLaw.into());
    }
    if !f.is_unit() {
        return Err(LpError::NotAnAtom(f.scalar.to_string()).into());
    }
    let phi = part.disintegration();
    let mut node = part.origin(n)?;
    for depth in 0..config.max_depth {
        let v = value_of(phi, &node)?;
        let w = precision(k, depth);
        if v.norm(p, w).hi_rational() < pow2(-(k as i64)) {
            return Ok(Recognition::Small);
        }
        // f*(g) f = g_m e_m for f = c e_m with |c| = 1
        let lambda = v.coordinate(f.index);
        if dominant(part, &node, &v, &lambda, w)? {
            return Ok(Recognition::Found(LpVector::from_entries([(f.index, lambda)])));
        }
        node = match part.successor(&node) {
            Ok(Some(next)) => next,
            Ok(None) | Err(DisintError::StageBudgetExceeded(_)) => break,
            Err(e) => return Err(e),
        };
    }
    Ok(Recognition::Undecided)
}

/// Right cut of `‖inf φ[C_n]‖_p`: at stage `s`, `‖φ(ν)‖_p + 2^-s` for the
/// deepest node of `C_n` reached within `s` steps.
pub fn chain_upper_cut(part: Arc<ChainPartition>, n: usize) -> CutEnumerator {
    let stream = FnEnumeration::new(move |s: usize| {
        let chain = match part.chain(n, s + 1) {
            Ok(chain) => chain,
            Err(DisintError::NoSuchChain(_)) => return vec![pow2(-(s as i64))],
            Err(_) => return Vec::new(),
        };
        let Some(node) = chain.last() else {
            return Vec::new();
        };
        match value_of(part.disintegration(), node) {
            Ok(v) => vec![v.norm(part.exponent(), s as u32 + 2).hi_rational() + pow2(-(s as i64))],
            Err(_) => Vec::new(),
        }
    });
    CutEnumerator::new(Side::Right, Arc::new(stream))
}

/// Left cut of `‖inf φ[C_n]‖_p`: at stage `s`, the lower end of
/// [`chain_infimum_norm`] at precision `s`, minus `2^-s`, when it resolves.
pub fn chain_lower_cut(part: Arc<ChainPartition>, n: usize) -> CutEnumerator {
    let stream = FnEnumeration::new(move |s: usize| {
        let config = ChainConfig { max_depth: s + 8 };
        match chain_infimum_norm(&part, n, s as u32, &config) {
            Ok(iv) => vec![iv.lo_rational() - pow2(-(s as i64))],
            Err(DisintError::NoSuchChain(_)) => vec![-pow2(-(s as i64))],
            Err(_) => Vec::new(),
        }
    });
    CutEnumerator::new(Side::Left, Arc::new(stream))
}

/// A real given by enclosures `[lo, hi]` with `hi − lo <= 2^-k`.
pub trait RealOracle: Send + Sync {
    fn enclose(&self, k: u32) -> Result<(Rational, Rational), DisintError>;
}

pub type NormFamily = Arc<dyn Fn(usize) -> Arc<dyn RealOracle> + Send + Sync>;

pub struct ExactReal(pub Rational);

impl RealOracle for ExactReal {
    fn enclose(&self, _k: u32) -> Result<(Rational, Rational), DisintError> {
        Ok((self.0.clone(), self.0.clone()))
    }
}

/// A real read off enumerations of both of its cuts.
pub struct CutPairOracle {
    pub left: CutEnumerator,
    pub right: CutEnumerator,
    pub max_stage: usize,
}

impl RealOracle for CutPairOracle {
    fn enclose(&self, k: u32) -> Result<(Rational, Rational), DisintError> {
        let target = pow2(-(k as i64));
        let mut l = self.left.cursor();
        let mut r = self.right.cursor();
        let (mut lo, mut hi): (Option<Rational>, Option<Rational>) = (None, None);
        for _ in 0..self.max_stage {
            for q in l.advance()? {
                if lo.as_ref().is_none_or(|b| &q > b) {
                    lo = Some(q);
                }
            }
            for q in r.advance()? {
                if hi.as_ref().is_none_or(|b| &q < b) {
                    hi = Some(q);
                }
            }
            if let (Some(a), Some(b)) = (&lo, &hi) {
                if b - a <= target {
                    return Ok((a.clone(), b.clone()));
                }
            }
        }
        Err(DisintError::StageBudgetExceeded(format!("cuts not within 2^-{k} after {} stages", self.max_stage)))
    }
}

/// `‖inf φ[C_n]‖_p` through [`chain_infimum_norm`].
pub struct ChainNormOracle {
    pub part: Arc<ChainPartition>,
    pub n: usize,
    pub config: ChainConfig,
}

impl RealOracle for ChainNormOracle {
    fn enclose(&self, k: u32) -> Result<(Rational, Rational), DisintError> {
        let iv = match chain_infimum_norm(&self.part, self.n, k, &self.config) {
            Err(DisintError::NoSuchChain(_)) => return Ok((Rational::zero(), Rational::zero())),
            other => other?,
        };
        Ok((max(&iv.lo_rational(), &Rational::zero()), iv.hi_rational()))
    }
}

/// Exact values `r_n`; members past the list are zero.
pub fn exact_norms(values: Vec<Rational>) -> NormFamily {
    let values = Arc::new(values);
    Arc::new(move |n| Arc::new(ExactReal(values.get(n).cloned().unwrap_or_default())) as Arc<dyn RealOracle>)
}

pub fn chain_norms(part: Arc<ChainPartition>, config: ChainConfig) -> NormFamily {
    Arc::new(move |n| {
        Arc::new(ChainNormOracle { part: part.clone(), n, config: config.clone() }) as Arc<dyn RealOracle>
    })
}

/// The compressed real `r` of the chain-infimum norms `r_n`, with the
/// reductions between its left cut and the join of the left cuts of the
/// `r_n`.
pub fn degree_real(part: Arc<ChainPartition>, bound: Rational) -> Result<Compression, DisintError> {
    if part.exponent().is_two() {
        return Err(LpError::ParallelogramLaw.into());
    }
    if !bound.is_positive() {
        return Err(DisintError::Invalid("the bound M must be positive".into()));
    }
    let lower = part.clone();
    let upper = part;
    let family = CeFamily {
        data: Arc::new(move |n| chain_lower_cut(lower.clone(), n)),
        effective: Arc::new(move |n| chain_upper_cut(upper.clone(), n)),
    };
    Ok(compress_right_ce(family, Some(bound))?)
}
