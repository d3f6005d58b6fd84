//! Ground-truth counting by exhaustive matching. Witness enumeration is
//! a sequence-alignment recursion over each node's children; disjoint
//! selections are counted by backtracking over the (small) witness
//! lists.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::formulas::binom;
use crate::pattern_lang::{metrics, Pattern, PatternAtom};
use crate::tree_core::{gen_trees_with_cap, FlatTree, NodeId, OrderedTree, TreeError, DEFAULT_MAX_EDGES};

/// How one triangle, ellipsis, node, or nested composite of a pattern
/// was assigned during a match. Two witnesses are equal iff their full
/// bindings are equal, so distinct ellipsis splits are distinct
/// witnesses even when they consume the same nodes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Binding {
    /// A pattern node (`o` or a nested `<>`-shaped composite) mapped to
    /// a tree node it consumes.
    Node { id: NodeId, children: Vec<Binding> },
    /// A triangle mapped to the subtree rooted at a child; consumes no
    /// nodes.
    Subtree(NodeId),
    /// An ellipsis mapped to a contiguous run of children of `parent`
    /// (child positions `start .. start + len`); consumes no nodes.
    Run { parent: NodeId, start: usize, len: usize },
}

/// One concrete occurrence of a pattern in a tree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Witness {
    pub anchor: NodeId,
    pub binding: Binding,
}

impl Witness {
    /// Preorder indices of the tree nodes this occurrence consumes: the
    /// images of the pattern's explicit nodes.
    pub fn consumed(&self) -> BTreeSet<NodeId> {
        let mut out = BTreeSet::new();
        collect_consumed(&self.binding, &mut out);
        out
    }

    fn mask(&self) -> u64 {
        self.consumed().iter().fold(0u64, |m, id| m | (1 << id.0))
    }
}

fn collect_consumed(b: &Binding, out: &mut BTreeSet<NodeId>) {
    if let Binding::Node { id, children } = b {
        out.insert(*id);
        for c in children {
            collect_consumed(c, out);
        }
    }
}

/// All occurrences of `p` in `t`, ordered by (anchor, assignment).
pub fn witnesses(p: &Pattern, t: &OrderedTree) -> Vec<Witness> {
    let flat = t.flatten();
    let mut out = Vec::new();
    for anchor in flat.node_ids() {
        for binding in match_atom(p.root(), &flat, anchor) {
            out.push(Witness { anchor, binding });
        }
    }
    out
}

fn match_atom(atom: &PatternAtom, flat: &FlatTree, node: NodeId) -> Vec<Binding> {
    match atom {
        PatternAtom::Lozenge => {
            if flat.is_leaf(node) {
                vec![Binding::Node { id: node, children: Vec::new() }]
            } else {
                Vec::new()
            }
        }
        PatternAtom::LightTriangle => vec![Binding::Subtree(node)],
        PatternAtom::DarkTriangle => {
            if flat.is_leaf(node) {
                Vec::new()
            } else {
                vec![Binding::Subtree(node)]
            }
        }
        PatternAtom::Composite(atoms) => {
            // the component sequence must consume the entire child list
            match_seq(atoms, flat, node, 0)
                .into_iter()
                .map(|children| Binding::Node { id: node, children })
                .collect()
        }
        // bare ellipses never occur as a whole pattern; they are handled
        // inside match_seq
        PatternAtom::LightEllipsis | PatternAtom::DarkEllipsis => {
            unreachable!("ellipses appear only within composites")
        }
    }
}

fn match_seq(atoms: &[PatternAtom], flat: &FlatTree, parent: NodeId, from: usize) -> Vec<Vec<Binding>> {
    let children = flat.children(parent);
    let Some((first, rest)) = atoms.split_first() else {
        return if from == children.len() { vec![Vec::new()] } else { Vec::new() };
    };
    let mut out = Vec::new();
    match first {
        PatternAtom::LightEllipsis | PatternAtom::DarkEllipsis => {
            let dark = matches!(first, PatternAtom::DarkEllipsis);
            let mut len = 0;
            loop {
                let run = Binding::Run { parent, start: from, len };
                for mut tail in match_seq(rest, flat, parent, from + len) {
                    tail.insert(0, run.clone());
                    out.push(tail);
                }
                if from + len >= children.len() {
                    break;
                }
                if dark && flat.is_leaf(children[from + len]) {
                    break;
                }
                len += 1;
            }
        }
        atom => {
            if from < children.len() {
                let child = children[from];
                for head in match_atom(atom, flat, child) {
                    for mut tail in match_seq(rest, flat, parent, from + 1) {
                        tail.insert(0, head.clone());
                        out.push(tail);
                    }
                }
            }
        }
    }
    out
}

/// A multiset of composite patterns with multiplicities, plus a number
/// of loose leaf patterns, to be counted among all `edges`-edge trees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountQuery {
    patterns: BTreeMap<Pattern, u32>,
    pub loose_leaves: usize,
    pub edges: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QueryError {
    #[error("pattern multiplicities must be at least 1")]
    ZeroMultiplicity,
    #[error("the leaf pattern enters a query via the loose-leaf count, not the multiset")]
    LeafInMultiset,
}

impl CountQuery {
    pub fn new(
        patterns: impl IntoIterator<Item = (Pattern, u32)>,
        loose_leaves: usize,
        edges: usize,
    ) -> Result<Self, QueryError> {
        let mut map = BTreeMap::new();
        for (p, mult) in patterns {
            if mult == 0 {
                return Err(QueryError::ZeroMultiplicity);
            }
            if !p.is_composite() {
                return Err(QueryError::LeafInMultiset);
            }
            *map.entry(p).or_insert(0) += mult;
        }
        Ok(CountQuery { patterns: map, loose_leaves, edges })
    }

    pub fn patterns(&self) -> impl Iterator<Item = (&Pattern, u32)> {
        self.patterns.iter().map(|(p, &m)| (p, m))
    }

    /// Total pattern count m = sum of multiplicities.
    pub fn total_multiplicity(&self) -> u32 {
        self.patterns.values().sum()
    }
}

/// Number of ways to choose, per pattern, an unordered set of that many
/// pairwise-disjoint witnesses (disjoint across patterns too), together
/// with a set of loose leaves avoiding every consumed node.
pub fn count_disjoint_selections(q: &CountQuery, t: &OrderedTree) -> BigInt {
    let flat = t.flatten();
    assert!(flat.len() <= 64, "oracle trees are capped well below 64 nodes");
    let leaf_mask: u64 = flat.leaf_ids().fold(0, |m, id| m | (1 << id.0));

    let lists: Vec<(Vec<u64>, usize)> = q
        .patterns
        .iter()
        .map(|(p, &mult)| {
            let masks: Vec<u64> = witnesses(p, t).iter().map(Witness::mask).collect();
            (masks, mult as usize)
        })
        .collect();

    let mut total = BigInt::zero();
    select(&lists, 0, 0, 0, leaf_mask, q.loose_leaves, &mut total);
    total
}

fn select(
    lists: &[(Vec<u64>, usize)],
    li: usize,
    next: usize,
    used: u64,
    leaf_mask: u64,
    loose: usize,
    total: &mut BigInt,
) {
    match lists.get(li) {
        None => {
            let free = (leaf_mask & !used).count_ones() as i64;
            *total += binom(free, loose as i64);
        }
        Some((masks, need)) => {
            if *need == 0 {
                select(lists, li + 1, 0, used, leaf_mask, loose, total);
                return;
            }
            // prune: not enough witnesses left for the remaining multiplicity
            if masks.len() < next + need {
                return;
            }
            for idx in next..=(masks.len() - need) {
                let m = masks[idx];
                if m & used != 0 {
                    continue;
                }
                let mut remaining = lists.to_vec();
                remaining[li].1 = need - 1;
                select(&remaining, li, idx + 1, used | m, leaf_mask, loose, total);
            }
        }
    }
}

/// Sum of `count_disjoint_selections` over all trees with `q.edges`
/// edges, under the default size cap.
pub fn oracle_count(q: &CountQuery) -> Result<BigInt, TreeError> {
    oracle_count_with(q, DEFAULT_MAX_EDGES, 1)
}

/// As `oracle_count`, with an explicit cap and worker count. The result
/// is identical for every `jobs` value.
pub fn oracle_count_with(q: &CountQuery, cap: usize, jobs: usize) -> Result<BigInt, TreeError> {
    let trees = gen_trees_with_cap(q.edges, cap)?;
    let jobs = jobs.max(1);
    if jobs == 1 || trees.len() < 2 * jobs {
        return Ok(trees.iter().map(|t| count_disjoint_selections(q, t)).sum());
    }
    let chunk = trees.len().div_ceil(jobs);
    let partials: Vec<BigInt> = std::thread::scope(|scope| {
        let handles: Vec<_> = trees
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter()
                        .map(|t| count_disjoint_selections(q, t))
                        .sum::<BigInt>()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    Ok(partials.into_iter().sum())
}

/// What a root-anchored count reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RootMode {
    /// Number of trees with at least one witness anchored at the root.
    TreesWithRootOccurrence,
    /// Total number of root-anchored witnesses.
    RootWitnessTotal,
}

pub fn oracle_root_count(p: &Pattern, n: usize, mode: RootMode) -> Result<BigInt, TreeError> {
    assert!(p.is_composite(), "root counting takes a composite pattern");
    let trees = gen_trees_with_cap(n, DEFAULT_MAX_EDGES)?;
    let mut total = BigInt::zero();
    for t in &trees {
        let at_root = witnesses(p, t)
            .iter()
            .filter(|w| w.anchor == NodeId(0))
            .count();
        match mode {
            RootMode::TreesWithRootOccurrence => {
                if at_root > 0 {
                    total += BigInt::one();
                }
            }
            RootMode::RootWitnessTotal => total += BigInt::from(at_root),
        }
    }
    Ok(total)
}

/// Witness count sanity: every witness consumes exactly v(p) nodes.
pub fn check_witness_sizes(p: &Pattern, t: &OrderedTree) -> bool {
    let v = metrics(p).v as usize;
    witnesses(p, t).iter().all(|w| w.consumed().len() == v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern_lang::parse_pattern;
    use crate::tree_core::{gen_trees, parse_tree};

    const FIG1: &str = "<<<><>><><<<>>>>";

    fn fig1() -> OrderedTree {
        parse_tree(FIG1).unwrap()
    }

    fn pat(text: &str) -> Pattern {
        parse_pattern(text).unwrap()
    }

    fn query(specs: &[(&str, u32)], leaves: usize, edges: usize) -> CountQuery {
        CountQuery::new(
            specs.iter().map(|&(s, m)| (pat(s), m)),
            leaves,
            edges,
        )
        .unwrap()
    }

    #[test]
    fn fig1_witness_counts() {
        let t = fig1();
        assert_eq!(witnesses(&pat("o"), &t).len(), 4);
        assert_eq!(witnesses(&pat("<t>"), &t).len(), 2);
        assert_eq!(witnesses(&pat("<so>"), &t).len(), 2);
        assert_eq!(witnesses(&pat("<So>"), &t).len(), 1);
        assert_eq!(witnesses(&pat("<tsos>"), &t).len(), 2);
    }

    #[test]
    fn fig1_only_children_anchors() {
        // <t> matches "only children": nodes h (preorder 5) and k (6)
        let t = fig1();
        let anchors: Vec<usize> = witnesses(&pat("<t>"), &t).iter().map(|w| w.anchor.0).collect();
        assert_eq!(anchors, vec![5, 6]);
    }

    #[test]
    fn witness_consumed_sizes() {
        for spec in ["o", "<t>", "<so>", "<So>", "<tsos>", "<SoSoS>", "<s<TS>s>"] {
            for n in 0..=5 {
                for t in gen_trees(n).unwrap() {
                    assert!(check_witness_sizes(&pat(spec), &t), "{spec}");
                }
            }
        }
    }

    #[test]
    fn distinct_ellipsis_splits_are_distinct_witnesses() {
        // <ss> at a node with one child splits the child run in two ways
        let t = parse_tree("<<>>").unwrap();
        let ws = witnesses(&pat("<ss>"), &t);
        assert_eq!(ws.len(), 3); // two splits at the root, one at the leaf
        let at_root: Vec<_> = ws.iter().filter(|w| w.anchor == NodeId(0)).collect();
        assert_eq!(at_root.len(), 2);
        assert_eq!(at_root[0].consumed(), at_root[1].consumed());
        assert_ne!(at_root[0].binding, at_root[1].binding);
    }

    #[test]
    fn disjoint_selection_fig1() {
        let t = fig1();
        assert_eq!(
            count_disjoint_selections(&query(&[("<so>", 2)], 0, 7), &t),
            BigInt::from(1)
        );
        assert_eq!(
            count_disjoint_selections(&query(&[("<so>", 3)], 0, 7), &t),
            BigInt::from(0)
        );
        assert_eq!(
            count_disjoint_selections(&query(&[("<os>", 1), ("<so>", 1)], 0, 7), &t),
            BigInt::from(2)
        );
    }

    #[test]
    fn disjoint_selection_lone_leaf() {
        let t = parse_tree("<>").unwrap();
        assert_eq!(count_disjoint_selections(&query(&[], 1, 0), &t), BigInt::from(1));
        assert_eq!(count_disjoint_selections(&query(&[], 2, 0), &t), BigInt::from(0));
    }

    #[test]
    fn oracle_count_worked_examples() {
        assert_eq!(oracle_count(&query(&[("<SoSoS>", 1)], 0, 4)).unwrap(), BigInt::from(6));
        assert_eq!(oracle_count(&query(&[("<TSst>", 1)], 3, 4)).unwrap(), BigInt::from(2));
        assert_eq!(oracle_count(&query(&[("<TSst>", 1)], 0, 4)).unwrap(), BigInt::from(5));
        assert_eq!(oracle_count(&query(&[], 3, 4)).unwrap(), BigInt::from(10));
    }

    #[test]
    fn empty_query_counts_trees() {
        for n in 0..=6 {
            let expect = gen_trees(n).unwrap().len();
            assert_eq!(oracle_count(&query(&[], 0, n)).unwrap(), BigInt::from(expect));
        }
    }

    #[test]
    fn eldest_leaf_counts_n4() {
        // <Sos> counts unprotected internal nodes once each: 24 at n=4;
        // <sos> counts leaf children: 35 at n=4
        assert_eq!(oracle_count(&query(&[("<Sos>", 1)], 0, 4)).unwrap(), BigInt::from(24));
        assert_eq!(oracle_count(&query(&[("<sos>", 1)], 0, 4)).unwrap(), BigInt::from(35));
    }

    #[test]
    fn root_counts() {
        assert_eq!(
            oracle_root_count(&pat("<TS>"), 4, RootMode::TreesWithRootOccurrence).unwrap(),
            BigInt::from(6)
        );
        assert_eq!(
            oracle_root_count(&pat("<sos>"), 4, RootMode::RootWitnessTotal).unwrap(),
            BigInt::from(14)
        );
        assert_eq!(
            oracle_root_count(&pat("<t>"), 3, RootMode::TreesWithRootOccurrence).unwrap(),
            BigInt::from(2)
        );
    }

    #[test]
    fn monotonic_exhaustion() {
        // raising a multiplicity past the available witnesses reaches 0
        let t = fig1();
        let mut last = count_disjoint_selections(&query(&[("<so>", 1)], 0, 7), &t);
        for mult in 2..5 {
            let next = count_disjoint_selections(&query(&[("<so>", mult)], 0, 7), &t);
            assert!(next <= last);
            last = next;
        }
        assert_eq!(last, BigInt::from(0));
    }

    #[test]
    fn jobs_do_not_change_the_sum() {
        let q = query(&[("<tsos>", 1)], 1, 5);
        let sequential = oracle_count_with(&q, 8, 1).unwrap();
        for jobs in [2, 3, 7] {
            assert_eq!(oracle_count_with(&q, 8, jobs).unwrap(), sequential);
        }
    }

    #[test]
    fn query_validation() {
        assert_eq!(
            CountQuery::new([(pat("<t>"), 0)], 0, 3),
            Err(QueryError::ZeroMultiplicity)
        );
        assert_eq!(
            CountQuery::new([(Pattern::leaf(), 1)], 0, 3),
            Err(QueryError::LeafInMultiset)
        );
        // identical patterns merge their multiplicities
        let q = CountQuery::new([(pat("<so>"), 1), (pat("<so>"), 1)], 0, 4).unwrap();
        assert_eq!(q.total_multiplicity(), 2);
        assert_eq!(q.patterns().count(), 1);
    }

    #[test]
    fn cap_is_enforced() {
        let q = query(&[], 0, 9);
        assert!(matches!(
            oracle_count_with(&q, 8, 1),
            Err(TreeError::CapExceeded { requested: 9, cap: 8 })
        ));
    }
}
