use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::sync::Arc;

use super::description::{GeometricTail, TreeNode, VectorDescription};
use super::DisintError;
use crate::effective::{FnEnumeration, ListEnumeration, SharedEnumeration, StageEnumeration};
use crate::exactnum::rational::{pow2, rat};
use crate::exactnum::{Dyadic, DyadicInterval, Exponent, GaussianRational};
use crate::lpspace::{norm, LpVector};

/// A labeling `φ` of an ancestor-closed, enumerated set of tree nodes.
pub trait Disintegration: Send + Sync {
    fn nodes(&self) -> SharedEnumeration<TreeNode>;

    fn value(&self, node: &TreeNode) -> Option<VectorDescription>;

    /// The number of children of `node`, when known in advance.
    fn child_count(&self, _node: &TreeNode) -> Option<usize> {
        None
    }

    /// For a finite tree, the number of stages after which nothing new appears.
    fn stage_count(&self) -> Option<usize> {
        None
    }
}

impl<T: Disintegration + ?Sized> Disintegration for Arc<T> {
    fn nodes(&self) -> SharedEnumeration<TreeNode> {
        (**self).nodes()
    }

    fn value(&self, node: &TreeNode) -> Option<VectorDescription> {
        (**self).value(node)
    }

    fn child_count(&self, node: &TreeNode) -> Option<usize> {
        (**self).child_count(node)
    }

    fn stage_count(&self) -> Option<usize> {
        (**self).stage_count()
    }
}

pub(crate) fn value_of(phi: &(impl Disintegration + ?Sized), node: &TreeNode) -> Result<VectorDescription, DisintError> {
    phi.value(node).ok_or_else(|| DisintError::Invalid(format!("node {node} has no value")))
}

/// Known to have no children. A single-coordinate value cannot be split
/// into two nonzero disjoint parts, so atoms are always terminal.
pub fn is_terminal(phi: &(impl Disintegration + ?Sized), node: &TreeNode) -> bool {
    if phi.child_count(node) == Some(0) {
        return true;
    }
    matches!(phi.value(node), Some(VectorDescription::Exact(v)) if v.support_len() == 1)
}

fn zeros(k: usize) -> TreeNode {
    TreeNode::new(vec![0; k])
}

/// `φ(0^k) = Σ_{n>=k} 2^-n e_n` and `φ(0^k 1) = 2^-k e_k`. Stage `k >= 1`
/// enumerates `0^k` and then `0^(k-1) 1`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Spine;

impl Spine {
    fn split(node: &TreeNode) -> Option<(usize, bool)> {
        let path = &node.path;
        match path.split_last() {
            None => Some((0, false)),
            Some((&last, init)) if init.iter().all(|&x| x == 0) && last <= 1 => Some((init.len(), last == 1)),
            _ => None,
        }
    }
}

impl Disintegration for Spine {
    fn nodes(&self) -> SharedEnumeration<TreeNode> {
        Arc::new(FnEnumeration::new(|s: usize| {
            if s == 0 {
                vec![TreeNode::root()]
            } else {
                vec![zeros(s), zeros(s - 1).child(1)]
            }
        }))
    }

    fn value(&self, node: &TreeNode) -> Option<VectorDescription> {
        let (k, atom) = Spine::split(node)?;
        Some(if atom {
            VectorDescription::Exact(LpVector::from_real([(k, pow2(-(k as i64)))]))
        } else {
            let k = node.len();
            VectorDescription::Tail(GeometricTail { start: k, ratio: rat(1, 2), coeff: GaussianRational::one() })
        })
    }

    fn child_count(&self, node: &TreeNode) -> Option<usize> {
        Spine::split(node).map(|(_, atom)| if atom { 0 } else { 2 })
    }
}

/// A finite tree; entry `i` is enumerated at stage `i`.
#[derive(Clone, Debug)]
pub struct FiniteDisintegration {
    entries: Vec<(TreeNode, VectorDescription)>,
    values: HashMap<TreeNode, VectorDescription>,
    counts: HashMap<TreeNode, usize>,
}

impl FiniteDisintegration {
    /// Rejects repeated nodes and nodes listed before their parent.
    pub fn new(entries: Vec<(TreeNode, VectorDescription)>) -> Result<Self, DisintError> {
        let mut values = HashMap::new();
        let mut counts = HashMap::new();
        for (node, v) in &entries {
            if let Some(parent) = node.parent() {
                if !values.contains_key(&parent) {
                    return Err(DisintError::Invalid(format!("node {node} listed before its parent")));
                }
                *counts.entry(parent).or_insert(0) += 1;
            }
            if values.insert(node.clone(), v.clone()).is_some() {
                return Err(DisintError::Invalid(format!("node {node} listed twice")));
            }
        }
        Ok(FiniteDisintegration { entries, values, counts })
    }

    /// `φ(λ) = e_0`.
    pub fn single_atom() -> Self {
        Self::new(vec![(TreeNode::root(), VectorDescription::Exact(LpVector::basis(0)))]).expect("valid tree")
    }

    /// `φ(λ) = e_0 + e_1` with leaves `e_0`, `e_1`.
    pub fn two_leaf() -> Self {
        let exact = VectorDescription::Exact;
        Self::new(vec![
            (TreeNode::root(), exact(&LpVector::basis(0) + &LpVector::basis(1))),
            (TreeNode::new(vec![0]), exact(LpVector::basis(0))),
            (TreeNode::new(vec![1]), exact(LpVector::basis(1))),
        ])
        .expect("valid tree")
    }

    /// Lines `path<TAB>vector-or-tail`; blank and `#` lines are skipped.
    pub fn parse(text: &str) -> Result<Self, DisintError> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end();
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let at = |e: DisintError| DisintError::Parse(format!("line {}: {e}", i + 1));
            let (path, value) = line
                .split_once('\t')
                .ok_or_else(|| at(DisintError::Parse("expected `path<TAB>vector`".into())))?;
            let node: TreeNode = path.trim().parse().map_err(at)?;
            let value: VectorDescription = value.parse().map_err(at)?;
            entries.push((node, value));
        }
        Self::new(entries)
    }

    pub fn entries(&self) -> &[(TreeNode, VectorDescription)] {
        &self.entries
    }
}

impl Disintegration for FiniteDisintegration {
    fn nodes(&self) -> SharedEnumeration<TreeNode> {
        Arc::new(ListEnumeration::new(self.entries.iter().map(|(n, _)| vec![n.clone()]).collect()))
    }

    fn value(&self, node: &TreeNode) -> Option<VectorDescription> {
        self.values.get(node).cloned()
    }

    fn child_count(&self, node: &TreeNode) -> Option<usize> {
        self.values.contains_key(node).then(|| self.counts.get(node).copied().unwrap_or(0))
    }

    fn stage_count(&self) -> Option<usize> {
        Some(self.entries.len())
    }
}

/// `path<TAB>vector` lines for every node enumerated before `stages`.
pub fn dump_tree(phi: &(impl Disintegration + ?Sized), stages: usize) -> Result<String, DisintError> {
    let mut out = String::new();
    if stages == 0 {
        return Ok(out);
    }
    for node in phi.nodes().snapshot(stages - 1)? {
        let v = value_of(phi, &node)?;
        let _ = writeln!(out, "{node}\t{v}");
    }
    Ok(out)
}

/// Checks the stage-`stages` snapshot: ancestor closure, injectivity,
/// never zero, disjoint values on incomparable nodes, and summativity
/// where every child has appeared.
pub fn validate(phi: &(impl Disintegration + ?Sized), stages: usize) -> Result<(), DisintError> {
    let bad = |s: String| Err(DisintError::Invalid(s));
    let nodes = if stages == 0 { Vec::new() } else { phi.nodes().snapshot(stages - 1)? };
    let present: HashSet<&TreeNode> = nodes.iter().collect();
    let mut values = Vec::new();
    let mut children: HashMap<&TreeNode, Vec<usize>> = HashMap::new();
    for (i, node) in nodes.iter().enumerate() {
        if let Some(parent) = node.parent() {
            match present.get(&parent) {
                Some(p) => children.entry(*p).or_default().push(i),
                None => return bad(format!("{node} is enumerated without its parent")),
            }
        }
        let v = value_of(phi, node)?;
        if v.is_zero() {
            return bad(format!("φ({node}) is zero"));
        }
        values.push(v);
    }
    let forms: Vec<_> = values.iter().map(VectorDescription::normal_form).collect();
    for i in 0..nodes.len() {
        for j in 0..i {
            if forms[i] == forms[j] {
                return bad(format!("φ({}) = φ({})", nodes[i], nodes[j]));
            }
            if !nodes[i].comparable(&nodes[j]) && !values[i].disjoint_from(&values[j]) {
                return bad(format!("φ({}) and φ({}) overlap", nodes[i], nodes[j]));
            }
        }
    }
    for (i, node) in nodes.iter().enumerate() {
        let kids = children.get(node).map(Vec::as_slice).unwrap_or(&[]);
        if kids.is_empty() || phi.child_count(node) != Some(kids.len()) {
            continue;
        }
        if !summative(&values[i], kids.iter().map(|&c| &values[c])) {
            return bad(format!("φ({node}) is not the sum of its children"));
        }
    }
    Ok(())
}

const SUM_CHECK_BITS: u32 = 40;

fn summative<'a>(parent: &VectorDescription, kids: impl Iterator<Item = &'a VectorDescription> + Clone) -> bool {
    let exact = kids.clone().try_fold(
        super::description::NormalForm { head: LpVector::zero(), tail: None },
        |acc, v| acc.add(&v.normal_form()),
    );
    if let Some(sum) = exact {
        return sum == parent.normal_form();
    }
    // incompatible tails: compare truncations
    let k = SUM_CHECK_BITS;
    let sum = kids.fold(LpVector::zero(), |acc, v| &acc + &v.truncate(k + 4));
    let diff = &parent.truncate(k + 4) - &sum;
    norm(&diff, &Exponent::one(), k).hi_rational() < pow2(-(k as i64) + 4)
}

/// `min{2^-|ν|, ‖φ(ν)‖_p^p}` with width `<= 2^-k`.
pub fn epsilon(
    node: &TreeNode,
    phi: &(impl Disintegration + ?Sized),
    p: &Exponent,
    k: u32,
) -> Result<DyadicInterval, DisintError> {
    let depth = DyadicInterval::point(Dyadic::pow2(-(node.len() as i64)));
    Ok(depth.min(&value_of(phi, node)?.norm_pow(p, k)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::int;

    #[test]
    fn spine_shape() {
        let s = Spine;
        let first = s.nodes().snapshot(2).unwrap();
        let names: Vec<String> = first.iter().map(|n| n.to_string()).collect();
        assert_eq!(names, ["λ", "0", "1", "0,0", "0,1"]);
        assert_eq!(s.value(&"0,1".parse().unwrap()).unwrap().to_string(), "1:1/2");
        assert_eq!(s.value(&"0,0".parse().unwrap()).unwrap().to_string(), "tail 2 1/2 1/1");
        assert!(s.value(&"1,0".parse().unwrap()).is_none());
        assert!(is_terminal(&s, &"0,0,1".parse().unwrap()));
        assert!(!is_terminal(&s, &"0,0".parse().unwrap()));
        validate(&s, 12).unwrap();
    }

    #[test]
    fn epsilon_examples() {
        let one = Exponent::one();
        let e = epsilon(&TreeNode::root(), &Spine, &one, 20).unwrap();
        assert!(e.contains_rational(&int(1)) && e.width_at_most(20));
        let e = epsilon(&"1".parse().unwrap(), &Spine, &one, 20).unwrap();
        assert!(e.contains_rational(&rat(1, 2)));
        let e = epsilon(&"0,0,0,0,0,1".parse().unwrap(), &Spine, &one, 20).unwrap();
        assert!(e.contains_rational(&rat(1, 64)));
        // for p = 3 the norm term wins
        let p3 = Exponent::from_ratio(3, 1).unwrap();
        let e = epsilon(&"0,1".parse().unwrap(), &Spine, &p3, 20).unwrap();
        assert!(e.contains_rational(&rat(1, 8)));
    }

    #[test]
    fn finite_files() {
        let text = "# two leaves\nλ\t0:1/1 1:1/1\n0\t0:1/1\n1\t1:1/1\n";
        let t = FiniteDisintegration::parse(text).unwrap();
        validate(&t, 3).unwrap();
        assert_eq!(dump_tree(&t, 3).unwrap(), "λ\t0:1/1 1:1/1\n0\t0:1/1\n1\t1:1/1\n");
        assert_eq!(t.child_count(&TreeNode::root()), Some(2));
        let err = FiniteDisintegration::parse("λ\t0:1/1\n0\t0:x\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(FiniteDisintegration::parse("0\t0:1/1\n").is_err());
        assert!(FiniteDisintegration::parse("λ\t0:1/1\nλ\t1:1/1\n").is_err());
    }

    #[test]
    fn validator_catches_violations() {
        let exact = |s: &str| VectorDescription::Exact(s.parse().unwrap());
        let node = |s: &str| s.parse::<TreeNode>().unwrap();
        let overlap = FiniteDisintegration::new(vec![
            (node("λ"), exact("0:1/1 1:1/1")),
            (node("0"), exact("0:1/1 1:1/2")),
            (node("1"), exact("1:1/2")),
        ])
        .unwrap();
        assert!(validate(&overlap, 3).unwrap_err().to_string().contains("overlap"));
        let not_sum = FiniteDisintegration::new(vec![
            (node("λ"), exact("0:1/1 1:1/1")),
            (node("0"), exact("0:1/1")),
            (node("1"), exact("1:1/2")),
        ])
        .unwrap();
        assert!(validate(&not_sum, 3).unwrap_err().to_string().contains("sum"));
        // the sum check only applies once every child has appeared
        validate(&not_sum, 2).unwrap();
        let repeated = FiniteDisintegration::new(vec![(node("λ"), exact("0:1/1")), (node("0"), exact("0:1/1"))]).unwrap();
        assert!(validate(&repeated, 2).is_err());
        validate(&FiniteDisintegration::two_leaf(), 3).unwrap();
    }
}
