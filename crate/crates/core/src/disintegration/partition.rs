use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::sync::{Arc, Mutex};

use num_traits::Signed;

use super::description::TreeNode;
use super::tree::{epsilon, is_terminal, value_of, Disintegration};
use super::DisintError;
use crate::effective::StageCursor;
use crate::exactnum::rational::ceil_log2;
use crate::exactnum::{DyadicInterval, Exponent, Rational};

const MAX_BITS: u32 = 2048;

/// The enumerated part of a tree, grown one stage at a time.
pub(crate) struct TreeState {
    cursor: Box<dyn StageCursor<TreeNode>>,
    /// Stages consumed so far.
    stage: usize,
    total: Option<usize>,
    /// Set once a search was cut short by the stage budget.
    starved: bool,
    order: Vec<TreeNode>,
    seen: HashSet<TreeNode>,
    children: HashMap<TreeNode, Vec<TreeNode>>,
}

impl TreeState {
    pub(crate) fn new(phi: &(impl Disintegration + ?Sized)) -> Self {
        TreeState {
            cursor: phi.nodes().cursor(),
            stage: 0,
            total: phi.stage_count(),
            starved: false,
            order: Vec::new(),
            seen: HashSet::new(),
            children: HashMap::new(),
        }
    }

    fn advance(&mut self, max_stage: usize, what: impl FnOnce() -> String) -> Result<(), DisintError> {
        if self.stage >= max_stage {
            self.starved = true;
            return Err(DisintError::StageBudgetExceeded(format!("{} within {max_stage} stages", what())));
        }
        for node in self.cursor.advance()? {
            if !self.seen.insert(node.clone()) {
                continue;
            }
            if let Some(parent) = node.parent() {
                self.children.entry(parent).or_default().push(node.clone());
            }
            self.order.push(node);
        }
        self.stage += 1;
        Ok(())
    }

    fn exhausted(&self) -> bool {
        self.total.is_some_and(|t| self.stage >= t)
    }

    fn children(&self, node: &TreeNode) -> &[TreeNode] {
        self.children.get(node).map(Vec::as_slice).unwrap_or(&[])
    }
}

fn bits_for(eps: &Rational) -> u32 {
    (-ceil_log2(eps)).max(0) as u32
}

/// The child search: once the enumerated children leave less than `eps`
/// of the parent's `p`-th power norm unaccounted for, return the first
/// enumerated child whose norm is within `eps` of every enumerated child's.
pub(crate) fn comp_child_in(
    state: &mut TreeState,
    phi: &(impl Disintegration + ?Sized),
    p: &Exponent,
    node: &TreeNode,
    eps: &Rational,
    max_stage: usize,
) -> Result<TreeNode, DisintError> {
    if is_terminal(phi, node) {
        return Err(DisintError::TerminalNode(node.clone()));
    }
    let parent = value_of(phi, node)?;
    while state.children(node).is_empty() {
        state.advance(max_stage, || format!("no child of {node}"))?;
    }
    let base = 12 + 2 * node.len() as u32 + bits_for(eps);
    let mut w = base.min(MAX_BITS);
    loop {
        let kids = state.children(node).to_vec();
        let values = kids.iter().map(|c| value_of(phi, c)).collect::<Result<Vec<_>, _>>()?;
        let norms: Vec<DyadicInterval> = values.iter().map(|v| v.norm_pow(p, w)).collect();
        let accounted: Rational = norms.iter().map(|n| n.lo_rational()).sum();
        let residual = parent.norm_pow(p, w).hi_rational() - accounted;
        if norms[0].lo_rational() + eps > residual {
            let mut ww = w;
            loop {
                let norms: Vec<DyadicInterval> = values.iter().map(|v| v.norm_pow(p, ww)).collect();
                let top = norms.iter().map(|n| n.hi_rational()).max().expect("at least one child");
                if let Some(i) = norms.iter().position(|n| n.lo_rational() + eps > top) {
                    return Ok(kids[i].clone());
                }
                if ww >= MAX_BITS {
                    break;
                }
                ww = (2 * ww).min(MAX_BITS);
            }
        }
        state.advance(max_stage, || format!("no certified child of {node}"))?;
        w = (w + 1).min(MAX_BITS);
    }
}

/// [`comp_child_in`] on a fresh enumeration of the tree.
pub fn comp_child(
    phi: &(impl Disintegration + ?Sized),
    p: &Exponent,
    node: &TreeNode,
    eps: &Rational,
    max_stage: usize,
) -> Result<TreeNode, DisintError> {
    if !eps.is_positive() {
        return Err(DisintError::Invalid("child search needs a positive tolerance".into()));
    }
    comp_child_in(&mut TreeState::new(phi), phi, p, node, eps, max_stage)
}

/// A strictly positive rational below `ε(ν)`: the lower endpoint at
/// precision `|ν| + 4`, refined until positive.
pub fn selection_epsilon(
    node: &TreeNode,
    phi: &(impl Disintegration + ?Sized),
    p: &Exponent,
) -> Result<Rational, DisintError> {
    let mut k = node.len() as u32 + 4;
    loop {
        let lo = epsilon(node, phi, p, k)?.lo_rational();
        if lo.is_positive() {
            return Ok(lo);
        }
        if k >= MAX_BITS {
            return Err(DisintError::Invalid(format!("φ({node}) is not separated from zero")));
        }
        k *= 2;
    }
}

#[derive(Clone, Debug)]
pub struct PartitionConfig {
    /// Tree stages available to all child searches together.
    pub max_stage: usize,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        PartitionConfig { max_stage: 4096 }
    }
}

struct PartitionState {
    tree: TreeState,
    psi: HashMap<TreeNode, TreeNode>,
    origins: Vec<TreeNode>,
    origin_index: HashMap<TreeNode, usize>,
    /// Prefix of the enumeration order already sorted into origins.
    scanned: usize,
}

/// The partition of the tree into chains `C_n`: `C_n` is the orbit of the
/// `n`-th origin under the selector `ψ`. Everything is computed lazily
/// and memoised.
pub struct ChainPartition {
    phi: Arc<dyn Disintegration>,
    p: Exponent,
    config: PartitionConfig,
    state: Mutex<PartitionState>,
}

pub fn build_partition(phi: Arc<dyn Disintegration>, p: Exponent, config: PartitionConfig) -> ChainPartition {
    let tree = TreeState::new(&phi);
    ChainPartition {
        phi,
        p,
        config,
        state: Mutex::new(PartitionState {
            tree,
            psi: HashMap::new(),
            origins: Vec::new(),
            origin_index: HashMap::new(),
            scanned: 0,
        }),
    }
}

impl ChainPartition {
    pub fn disintegration(&self) -> &Arc<dyn Disintegration> {
        &self.phi
    }

    pub fn exponent(&self) -> &Exponent {
        &self.p
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, PartitionState> {
        self.state.lock().unwrap_or_else(|e| e.into_inner())
    }

    fn psi_in(&self, st: &mut PartitionState, node: &TreeNode) -> Result<TreeNode, DisintError> {
        if let Some(c) = st.psi.get(node) {
            return Ok(c.clone());
        }
        let eps = selection_epsilon(node, &self.phi, &self.p)?;
        let c = comp_child_in(&mut st.tree, &self.phi, &self.p, node, &eps, self.config.max_stage)?;
        st.psi.insert(node.clone(), c.clone());
        Ok(c)
    }

    /// Whether some search ran into the stage budget.
    pub fn starved(&self) -> bool {
        self.lock().tree.starved
    }

    /// `ψ(ν)`, or `None` for a terminal node.
    pub fn successor(&self, node: &TreeNode) -> Result<Option<TreeNode>, DisintError> {
        if is_terminal(&self.phi, node) {
            return Ok(None);
        }
        let mut st = self.lock();
        self.psi_in(&mut st, node).map(Some)
    }

    /// The origin of `C_n`.
    pub fn origin(&self, n: usize) -> Result<TreeNode, DisintError> {
        let mut st = self.lock();
        while st.origins.len() <= n {
            if st.scanned == st.tree.order.len() {
                if st.tree.exhausted() {
                    return Err(DisintError::NoSuchChain(n));
                }
                st.tree.advance(self.config.max_stage, || format!("no origin for chain {n}"))?;
                continue;
            }
            let node = st.tree.order[st.scanned].clone();
            let is_origin = match node.parent() {
                None => true,
                Some(parent) => self.psi_in(&mut st, &parent)? != node,
            };
            if is_origin {
                let i = st.origins.len();
                st.origin_index.insert(node.clone(), i);
                st.origins.push(node);
            }
            st.scanned += 1;
        }
        Ok(st.origins[n].clone())
    }

    /// The `n` with `ν ∈ C_n`.
    pub fn chain_index(&self, node: &TreeNode) -> Result<usize, DisintError> {
        let mut origin = node.clone();
        while let Some(parent) = origin.parent() {
            let next = {
                let mut st = self.lock();
                self.psi_in(&mut st, &parent)?
            };
            if next != origin {
                break;
            }
            origin = parent;
        }
        let mut n = 0;
        loop {
            if let Some(&i) = self.lock().origin_index.get(&origin) {
                return Ok(i);
            }
            self.origin(n)?;
            n += 1;
        }
    }

    /// The node of `C_n` at `depth`, or `None` past a terminal node.
    pub fn chain_node(&self, n: usize, depth: usize) -> Result<Option<TreeNode>, DisintError> {
        let mut node = self.origin(n)?;
        for _ in 0..depth {
            match self.successor(&node)? {
                Some(next) => node = next,
                None => return Ok(None),
            }
        }
        Ok(Some(node))
    }

    /// The first `len` nodes of `C_n`, fewer if the chain ends.
    pub fn chain(&self, n: usize, len: usize) -> Result<Vec<TreeNode>, DisintError> {
        let mut out = Vec::new();
        if len == 0 {
            return Ok(out);
        }
        let mut node = self.origin(n)?;
        loop {
            out.push(node.clone());
            if out.len() == len {
                return Ok(out);
            }
            match self.successor(&node)? {
                Some(next) => node = next,
                None => return Ok(out),
            }
        }
    }

    /// `n<TAB>path` lines for the first `depth` nodes of chains `0..count`.
    pub fn dump(&self, count: usize, depth: usize) -> Result<String, DisintError> {
        let mut out = String::new();
        for n in 0..count {
            for node in self.chain(n, depth)? {
                let _ = writeln!(out, "{n}\t{node}");
            }
        }
        Ok(out)
    }

    /// `ε(ν)` with width `<= 2^-k`.
    pub fn epsilon(&self, node: &TreeNode, k: u32) -> Result<DyadicInterval, DisintError> {
        epsilon(node, &self.phi, &self.p, k)
    }
}
