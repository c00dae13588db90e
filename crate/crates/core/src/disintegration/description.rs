use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed};

use super::DisintError;
use crate::exactnum::rational::{format_rational, parse_rational, pow_u};
use crate::exactnum::{
    abs_pow, pow_rational, pth_root, refine, DyadicInterval, Exponent, GaussianRational, Rational,
};
use crate::lpspace::{norm_pow, LpVector};
use crate::presentation::{OracleError, VectorOracle};

/// A node of the tree `ℕ*`, the root being the empty path `λ`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeNode {
    pub path: Vec<usize>,
}

impl TreeNode {
    pub fn root() -> Self {
        TreeNode::default()
    }

    pub fn new(path: Vec<usize>) -> Self {
        TreeNode { path }
    }

    pub fn len(&self) -> usize {
        self.path.len()
    }

    pub fn is_root(&self) -> bool {
        self.path.is_empty()
    }

    pub fn parent(&self) -> Option<TreeNode> {
        let mut path = self.path.clone();
        path.pop()?;
        Some(TreeNode { path })
    }

    pub fn child(&self, i: usize) -> TreeNode {
        let mut path = self.path.clone();
        path.push(i);
        TreeNode { path }
    }

    /// `self` is a (non-strict) prefix of `other`.
    pub fn is_prefix_of(&self, other: &TreeNode) -> bool {
        other.path.starts_with(&self.path)
    }

    pub fn comparable(&self, other: &TreeNode) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }
}

impl fmt::Display for TreeNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            return f.write_str("λ");
        }
        let parts: Vec<String> = self.path.iter().map(usize::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for TreeNode {
    type Err = DisintError;

    fn from_str(s: &str) -> Result<Self, DisintError> {
        let s = s.trim();
        if s.is_empty() || s == "λ" {
            return Ok(TreeNode::root());
        }
        s.split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| DisintError::Parse(format!("bad path `{s}`"))))
            .collect::<Result<Vec<_>, _>>()
            .map(TreeNode::new)
    }
}

/// `Σ_{n >= start} coeff · ratio^n e_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GeometricTail {
    pub start: usize,
    pub ratio: Rational,
    pub coeff: GaussianRational,
}

impl GeometricTail {
    pub fn new(start: usize, ratio: Rational, coeff: GaussianRational) -> Result<Self, DisintError> {
        if !ratio.is_positive() || ratio >= Rational::one() {
            return Err(DisintError::Invalid(format!("tail ratio {} outside (0,1)", format_rational(&ratio))));
        }
        if coeff.is_zero() {
            return Err(DisintError::Invalid("tail with zero coefficient".into()));
        }
        Ok(GeometricTail { start, ratio, coeff })
    }

    pub fn coordinate(&self, n: usize) -> GaussianRational {
        if n < self.start {
            return GaussianRational::zero();
        }
        self.coeff.scale(&pow_u(&self.ratio, n as u32))
    }

    /// `|c|^p r^(start p) / (1 − r^p)`.
    pub fn norm_pow(&self, p: &Exponent, k: u32) -> DyadicInterval {
        refine(k, |w| {
            let c = abs_pow(&self.coeff, p, w);
            let rp = pow_rational(&self.ratio, p.value(), w);
            let head = pow_rational(&pow_u(&self.ratio, self.start as u32), p.value(), w);
            let denom = (&DyadicInterval::one() - &rp).recip(w).expect("ratio below one");
            (&(&c * &head) * &denom).round_out(w)
        })
    }

    /// First `n` with `|c| r^n / (1 − r) < 2^-k`, which bounds the tail norm
    /// beyond `n` for every `p >= 1`.
    fn cutoff(&self, k: u32) -> usize {
        let c = self.coeff.l1_bound();
        let slack = Rational::one() - &self.ratio;
        let target = Rational::new(1.into(), num_bigint::BigInt::one() << k);
        let mut n = self.start;
        let mut term = &c * pow_u(&self.ratio, n as u32);
        while &term / &slack >= target {
            n += 1;
            term *= &self.ratio;
        }
        n
    }

    /// A finitely supported vector within `2^-k` in every `l^p`.
    pub fn truncate(&self, k: u32) -> LpVector {
        let end = self.cutoff(k);
        LpVector::from_entries((self.start..end).map(|n| (n, self.coordinate(n))))
    }
}

impl fmt::Display for GeometricTail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tail {} {} {}", self.start, format_rational(&self.ratio), self.coeff)
    }
}

impl FromStr for GeometricTail {
    type Err = DisintError;

    fn from_str(s: &str) -> Result<Self, DisintError> {
        let bad = |why: &str| DisintError::Parse(format!("tail `{s}`: {why}"));
        let rest = s.trim().strip_prefix("tail").ok_or_else(|| bad("must start with `tail`"))?;
        let mut it = rest.split_whitespace();
        let start = it.next().ok_or_else(|| bad("missing start"))?.parse().map_err(|_| bad("bad start"))?;
        let ratio = parse_rational(it.next().ok_or_else(|| bad("missing ratio"))?).map_err(|_| bad("bad ratio"))?;
        let coeff: Vec<&str> = it.collect();
        if coeff.is_empty() {
            return Err(bad("missing coefficient"));
        }
        let coeff = coeff.join(" ").parse::<GaussianRational>().map_err(|_| bad("bad coefficient"))?;
        GeometricTail::new(start, ratio, coeff)
    }
}

/// The value of a tree node: an exact finitely supported vector or a
/// geometric tail.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum VectorDescription {
    Exact(LpVector),
    Tail(GeometricTail),
}

/// `head + tail`, with the tail absorbing every head entry it predicts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    pub head: LpVector,
    pub tail: Option<GeometricTail>,
}

impl NormalForm {
    fn canonical(mut self) -> Self {
        if let Some(t) = &mut self.tail {
            while t.start > 0 {
                let n = t.start - 1;
                let predicted = t.coeff.scale(&pow_u(&t.ratio, n as u32));
                if self.head.get(n) != predicted {
                    break;
                }
                self.head.set(n, GaussianRational::zero());
                t.start = n;
            }
        }
        self
    }

    /// Exact sum when the tails are compatible.
    pub fn add(&self, other: &NormalForm) -> Option<NormalForm> {
        let mut head = &self.head + &other.head;
        let tail = match (&self.tail, &other.tail) {
            (None, t) | (t, None) => t.clone(),
            (Some(a), Some(b)) => {
                if a.ratio != b.ratio {
                    return None;
                }
                let (lo, hi) = if a.start <= b.start { (a, b) } else { (b, a) };
                for n in lo.start..hi.start {
                    head.add_at(n, &lo.coordinate(n));
                }
                let coeff = &a.coeff + &b.coeff;
                if coeff.is_zero() {
                    None
                } else {
                    Some(GeometricTail { start: hi.start, ratio: a.ratio.clone(), coeff })
                }
            }
        };
        Some(NormalForm { head, tail }.canonical())
    }
}

impl VectorDescription {
    pub fn normal_form(&self) -> NormalForm {
        match self {
            VectorDescription::Exact(v) => NormalForm { head: v.clone(), tail: None },
            VectorDescription::Tail(t) => NormalForm { head: LpVector::zero(), tail: Some(t.clone()) }.canonical(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, VectorDescription::Exact(v) if v.is_zero())
    }

    pub fn coordinate(&self, n: usize) -> GaussianRational {
        match self {
            VectorDescription::Exact(v) => v.get(n),
            VectorDescription::Tail(t) => t.coordinate(n),
        }
    }

    /// Index of a coordinate of largest modulus.
    pub fn largest_coordinate(&self) -> Option<usize> {
        match self {
            VectorDescription::Exact(v) => {
                let mut best: Option<(usize, Rational)> = None;
                for (n, z) in v.entries() {
                    let m = z.norm_sqr();
                    if best.as_ref().is_none_or(|(_, b)| &m > b) {
                        best = Some((n, m));
                    }
                }
                best.map(|(n, _)| n)
            }
            VectorDescription::Tail(t) => Some(t.start),
        }
    }

    pub fn disjoint_from(&self, other: &VectorDescription) -> bool {
        use VectorDescription::*;
        match (self, other) {
            (Exact(a), Exact(b)) => a.disjoint_from(b),
            (Exact(a), Tail(t)) | (Tail(t), Exact(a)) => a.support().all(|n| n < t.start),
            (Tail(_), Tail(_)) => false,
        }
    }

    pub fn norm_pow(&self, p: &Exponent, k: u32) -> DyadicInterval {
        match self {
            VectorDescription::Exact(v) => norm_pow(v, p, k),
            VectorDescription::Tail(t) => t.norm_pow(p, k),
        }
    }

    pub fn norm(&self, p: &Exponent, k: u32) -> DyadicInterval {
        if self.is_zero() {
            return DyadicInterval::zero();
        }
        refine(k, |w| pth_root(&self.norm_pow(p, w), p, w + 1))
    }

    /// A finitely supported vector within `2^-k`.
    pub fn truncate(&self, k: u32) -> LpVector {
        match self {
            VectorDescription::Exact(v) => v.clone(),
            VectorDescription::Tail(t) => t.truncate(k),
        }
    }
}

impl VectorOracle for VectorDescription {
    fn approx(&self, k: u32) -> Result<LpVector, OracleError> {
        Ok(self.truncate(k))
    }
}

impl fmt::Display for VectorDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VectorDescription::Exact(v) => write!(f, "{v}"),
            VectorDescription::Tail(t) => write!(f, "{t}"),
        }
    }
}

impl FromStr for VectorDescription {
    type Err = DisintError;

    fn from_str(s: &str) -> Result<Self, DisintError> {
        if s.trim_start().starts_with("tail") {
            return Ok(VectorDescription::Tail(s.parse()?));
        }
        s.parse::<LpVector>().map(VectorDescription::Exact).map_err(|e| DisintError::Parse(e.to_string()))
    }
}
