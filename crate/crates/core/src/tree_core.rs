//! Ordered (plane) trees: bracket notation, exhaustive generation,
//! the Dyck-path bijection, and per-tree structural statistics.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default bound on the edge count for exhaustive generation.
pub const DEFAULT_MAX_EDGES: usize = 16;

/// A rooted tree whose children are linearly ordered.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OrderedTree {
    pub children: Vec<OrderedTree>,
}

/// Preorder index of a node within a tree (root = 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("unbalanced brackets at byte {0}")]
    Unbalanced(usize),
    #[error("unexpected character {0:?} at byte {1}")]
    StrayCharacter(char, usize),
    #[error("empty input")]
    Empty,
    #[error("trailing input after the top-level tree at byte {0}")]
    Trailing(usize),
    #[error("edge count {requested} exceeds the configured cap {cap}")]
    CapExceeded { requested: usize, cap: usize },
    #[error("invalid Dyck word: prefix dips below zero at step {0}")]
    DyckUnderflow(usize),
    #[error("invalid Dyck word: unbalanced step counts")]
    DyckUnbalanced,
    #[error("invalid Dyck step {0:?} (expected 'U' or 'D')")]
    DyckBadStep(char),
}

impl OrderedTree {
    pub fn leaf() -> Self {
        OrderedTree { children: Vec::new() }
    }

    pub fn new(children: Vec<OrderedTree>) -> Self {
        OrderedTree { children }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(|c| c.node_count()).sum::<usize>()
    }

    pub fn edge_count(&self) -> usize {
        self.node_count() - 1
    }

    /// Flattened preorder view, the canonical node addressing.
    pub fn flatten(&self) -> FlatTree {
        let mut nodes = Vec::with_capacity(self.node_count());
        fn walk(t: &OrderedTree, nodes: &mut Vec<FlatNode>) -> usize {
            let id = nodes.len();
            nodes.push(FlatNode { children: Vec::with_capacity(t.children.len()) });
            for child in &t.children {
                let cid = walk(child, nodes);
                nodes[id].children.push(NodeId(cid));
            }
            id
        }
        walk(self, &mut nodes);
        FlatTree { nodes }
    }
}

impl fmt::Display for OrderedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render_tree(self))
    }
}

#[derive(Debug, Clone)]
pub struct FlatNode {
    pub children: Vec<NodeId>,
}

/// Preorder-indexed tree; node 0 is the root.
#[derive(Debug, Clone)]
pub struct FlatTree {
    nodes: Vec<FlatNode>,
}

impl FlatTree {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false // a tree always has a root
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.nodes[id.0].children
    }

    pub fn is_leaf(&self, id: NodeId) -> bool {
        self.nodes[id.0].children.is_empty()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len()).map(NodeId)
    }

    pub fn leaf_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.node_ids().filter(|&id| self.is_leaf(id))
    }
}

/// Parses bracket notation: a leaf is `<>`, children nest inside.
/// Whitespace is ignored.
pub fn parse_tree(text: &str) -> Result<OrderedTree, TreeError> {
    let mut stack: Vec<OrderedTree> = Vec::new();
    let mut top: Option<OrderedTree> = None;
    for (pos, ch) in text.char_indices() {
        match ch {
            '<' => {
                if top.is_some() && stack.is_empty() {
                    return Err(TreeError::Trailing(pos));
                }
                stack.push(OrderedTree::leaf());
            }
            '>' => {
                let node = stack.pop().ok_or(TreeError::Unbalanced(pos))?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(node),
                    None => top = Some(node),
                }
            }
            c if c.is_whitespace() => {}
            c => return Err(TreeError::StrayCharacter(c, pos)),
        }
    }
    if !stack.is_empty() {
        return Err(TreeError::Unbalanced(text.len()));
    }
    top.ok_or(TreeError::Empty)
}

/// Canonical bracket form with no whitespace.
pub fn render_tree(t: &OrderedTree) -> String {
    let mut out = String::with_capacity(2 * t.node_count());
    fn walk(t: &OrderedTree, out: &mut String) {
        out.push('<');
        for c in &t.children {
            walk(c, out);
        }
        out.push('>');
    }
    walk(t, &mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Up,
    Down,
}

/// A balanced lattice path of `Up`/`Down` steps that never dips below zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyckWord {
    pub steps: Vec<Step>,
}

impl DyckWord {
    pub fn parse(text: &str) -> Result<Self, TreeError> {
        let mut steps = Vec::with_capacity(text.len());
        for ch in text.chars() {
            match ch {
                'U' => steps.push(Step::Up),
                'D' => steps.push(Step::Down),
                c if c.is_whitespace() => {}
                c => return Err(TreeError::DyckBadStep(c)),
            }
        }
        let w = DyckWord { steps };
        w.validate()?;
        Ok(w)
    }

    fn validate(&self) -> Result<(), TreeError> {
        let mut height: i64 = 0;
        for (i, s) in self.steps.iter().enumerate() {
            match s {
                Step::Up => height += 1,
                Step::Down => height -= 1,
            }
            if height < 0 {
                return Err(TreeError::DyckUnderflow(i));
            }
        }
        if height != 0 {
            return Err(TreeError::DyckUnbalanced);
        }
        Ok(())
    }

    /// Peaks at height 1: an Up step starting at level 0 immediately
    /// followed by a Down step.
    pub fn hills(&self) -> usize {
        let mut height = 0usize;
        let mut hills = 0usize;
        let mut i = 0;
        while i < self.steps.len() {
            match self.steps[i] {
                Step::Up => {
                    if height == 0 && self.steps.get(i + 1) == Some(&Step::Down) {
                        hills += 1;
                    }
                    height += 1;
                }
                Step::Down => height -= 1,
            }
            i += 1;
        }
        hills
    }
}

impl fmt::Display for DyckWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            f.write_str(match s {
                Step::Up => "U",
                Step::Down => "D",
            })?;
        }
        Ok(())
    }
}

/// Preorder traversal: each edge contributes an Up on descent and a
/// Down on return. The 0-edge tree maps to the empty word.
pub fn to_dyck(t: &OrderedTree) -> DyckWord {
    let mut steps = Vec::with_capacity(2 * t.edge_count());
    fn walk(t: &OrderedTree, steps: &mut Vec<Step>) {
        for c in &t.children {
            steps.push(Step::Up);
            walk(c, steps);
            steps.push(Step::Down);
        }
    }
    walk(t, &mut steps);
    DyckWord { steps }
}

pub fn from_dyck(w: &DyckWord) -> Result<OrderedTree, TreeError> {
    w.validate()?;
    let mut stack = vec![OrderedTree::leaf()];
    for s in &w.steps {
        match s {
            Step::Up => stack.push(OrderedTree::leaf()),
            Step::Down => {
                let node = stack.pop().expect("validated word cannot underflow");
                stack.last_mut().expect("root stays on the stack").children.push(node);
            }
        }
    }
    debug_assert_eq!(stack.len(), 1);
    Ok(stack.pop().unwrap())
}

/// All ordered trees with `n` edges, in lexicographic Dyck order (Up < Down).
pub fn gen_trees(n: usize) -> Result<Vec<OrderedTree>, TreeError> {
    gen_trees_with_cap(n, DEFAULT_MAX_EDGES)
}

pub fn gen_trees_with_cap(n: usize, cap: usize) -> Result<Vec<OrderedTree>, TreeError> {
    if n > cap {
        return Err(TreeError::CapExceeded { requested: n, cap });
    }
    let mut out = Vec::new();
    let mut steps = Vec::with_capacity(2 * n);
    gen_rec(n, 0, &mut steps, &mut out);
    Ok(out)
}

fn gen_rec(ups_left: usize, height: usize, steps: &mut Vec<Step>, out: &mut Vec<OrderedTree>) {
    if ups_left == 0 && height == 0 {
        let w = DyckWord { steps: steps.clone() };
        out.push(from_dyck(&w).expect("generated words are valid"));
        return;
    }
    if ups_left > 0 {
        steps.push(Step::Up);
        gen_rec(ups_left - 1, height + 1, steps, out);
        steps.pop();
    }
    if height > 0 {
        steps.push(Step::Down);
        gen_rec(ups_left, height - 1, steps, out);
        steps.pop();
    }
}

/// Structural counts for one tree. `stumps` are leaves at level one and
/// always equal `hills_of_path`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TreeStats {
    pub leaves: usize,
    pub internal_nodes: usize,
    pub stumps: usize,
    pub protected_nodes: usize,
    pub unprotected_internal_nodes: usize,
    pub hills_of_path: usize,
}

pub fn tree_stats(t: &OrderedTree) -> TreeStats {
    let flat = t.flatten();
    let mut leaves = 0;
    let mut internal = 0;
    let mut protected = 0;
    for id in flat.node_ids() {
        if flat.is_leaf(id) {
            leaves += 1;
        } else {
            internal += 1;
            if flat.children(id).iter().all(|&c| !flat.is_leaf(c)) {
                protected += 1;
            }
        }
    }
    let stumps = flat
        .children(NodeId(0))
        .iter()
        .filter(|&&c| flat.is_leaf(c))
        .count();
    TreeStats {
        leaves,
        internal_nodes: internal,
        stumps,
        protected_nodes: protected,
        unprotected_internal_nodes: internal - protected,
        hills_of_path: to_dyck(t).hills(),
    }
}

/// True iff every root-to-leaf path has at least `k` edges. Protection is
/// defined on internal nodes, so the 0-edge tree is never k-protected.
pub fn is_k_protected(t: &OrderedTree, k: usize) -> bool {
    assert!(k >= 1, "k-protection is defined for k >= 1");
    min_leaf_depth(t) >= k
}

fn min_leaf_depth(t: &OrderedTree) -> usize {
    t.children
        .iter()
        .map(|c| 1 + min_leaf_depth(c))
        .min()
        .unwrap_or(0)
}
