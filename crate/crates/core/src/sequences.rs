//! Named integer-sequence generators built from the closed forms,
//! vendored reference prefixes, and a cross-validation harness that
//! compares generator, brute-force enumeration, and reference term by
//! term.

use num_bigint::BigInt;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::formulas;
use crate::oracle::{oracle_root_count, RootMode};
use crate::pattern_lang::{Pattern, PatternAtom};
use crate::tree_core::{gen_trees_with_cap, is_k_protected, tree_stats};

/// Largest edge count the brute-force column is computed for.
pub const ORACLE_MAX_EDGES: usize = 7;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SequenceError {
    #[error("unknown sequence id {0:?}")]
    UnknownId(String),
    #[error("term count {requested} exceeds the vendored prefix length {available}")]
    BeyondPrefix { requested: usize, available: usize },
    #[error("sequence {0:?} is not a triangle")]
    NotTriangle(String),
}

/// Term address: scalar sequences use `n` alone, triangles use `(n, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TermIndex {
    pub n: i64,
    pub param: Option<i64>,
}

impl std::fmt::Display for TermIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.param {
            Some(p) => write!(f, "({},{})", self.n, p),
            None => write!(f, "{}", self.n),
        }
    }
}

enum Shape {
    Scalar,
    /// Row `n` holds parameters `first(n) ..= last(n)`; terms are
    /// flattened row by row.
    Triangle { first: fn(i64) -> i64, last: fn(i64) -> i64 },
}

pub struct SequenceDef {
    pub id: &'static str,
    pub description: &'static str,
    /// n of the first row or term.
    pub offset: i64,
    shape: Shape,
    generator: fn(i64, i64) -> BigInt,
    oracle: Option<fn(i64, i64) -> BigInt>,
    reference: &'static str,
}

impl SequenceDef {
    pub fn is_triangle(&self) -> bool {
        matches!(self.shape, Shape::Triangle { .. })
    }

    /// Flat term addresses in order, unbounded iterator.
    fn indices(&self) -> impl Iterator<Item = TermIndex> + '_ {
        let offset = self.offset;
        (0i64..).flat_map(move |row| -> Vec<TermIndex> {
            let n = offset + row;
            match &self.shape {
                Shape::Scalar => vec![TermIndex { n, param: None }],
                Shape::Triangle { first, last } => (first(n)..=last(n))
                    .map(|p| TermIndex { n, param: Some(p) })
                    .collect(),
            }
        })
    }

    pub fn term(&self, idx: TermIndex) -> BigInt {
        (self.generator)(idx.n, idx.param.unwrap_or(0))
    }

    pub fn oracle_term(&self, idx: TermIndex) -> Option<BigInt> {
        if idx.n > ORACLE_MAX_EDGES as i64 {
            return None;
        }
        self.oracle.map(|f| f(idx.n, idx.param.unwrap_or(0)))
    }

    /// One row of a triangle sequence.
    pub fn row(&self, n: i64) -> Result<Vec<BigInt>, SequenceError> {
        match &self.shape {
            Shape::Triangle { first, last } => {
                Ok((first(n)..=last(n)).map(|p| (self.generator)(n, p)).collect())
            }
            Shape::Scalar => Err(SequenceError::NotTriangle(self.id.to_string())),
        }
    }

    /// Vendored reference terms (flat, row by row for triangles).
    pub fn reference_terms(&self) -> Vec<BigInt> {
        self.reference
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.parse().expect("vendored reference terms are integers"))
            .collect()
    }
}

/// First `count` terms of a registered sequence.
pub fn emit(id: &str, count: usize) -> Result<Vec<BigInt>, SequenceError> {
    let def = lookup(id)?;
    Ok(def.indices().take(count).map(|i| def.term(i)).collect())
}

fn ser_bigint<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_opt_bigint<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_some(&v.to_string()),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CrosscheckRow {
    pub index: TermIndex,
    #[serde(serialize_with = "ser_bigint")]
    pub formula: BigInt,
    #[serde(serialize_with = "ser_opt_bigint")]
    pub oracle: Option<BigInt>,
    #[serde(serialize_with = "ser_opt_bigint")]
    pub reference: Option<BigInt>,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrosscheckReport {
    pub id: String,
    pub rows: Vec<CrosscheckRow>,
    pub ok: bool,
}

/// Compares generator, brute force, and vendored reference for every
/// term with n <= n_max. Mismatches are data, not errors.
pub fn crosscheck(id: &str, n_max: i64) -> Result<CrosscheckReport, SequenceError> {
    let def = lookup(id)?;
    let reference = def.reference_terms();
    let mut rows = Vec::new();
    for (pos, idx) in def.indices().enumerate() {
        if idx.n > n_max {
            break;
        }
        let formula = def.term(idx);
        let oracle = def.oracle_term(idx);
        let reference = reference.get(pos).cloned();
        let ok = oracle.as_ref().map_or(true, |o| *o == formula)
            && reference.as_ref().map_or(true, |r| *r == formula);
        rows.push(CrosscheckRow { index: idx, formula, oracle, reference, ok });
    }
    let ok = rows.iter().all(|r| r.ok);
    Ok(CrosscheckReport { id: id.to_string(), rows, ok })
}

pub fn lookup(id: &str) -> Result<&'static SequenceDef, SequenceError> {
    registry()
        .iter()
        .find(|d| d.id == id)
        .ok_or_else(|| SequenceError::UnknownId(id.to_string()))
}

pub fn registry() -> &'static [SequenceDef] {
    &REGISTRY
}

fn count_trees(n: i64, pred: impl Fn(&crate::tree_core::OrderedTree) -> bool) -> BigInt {
    let trees = gen_trees_with_cap(n as usize, ORACLE_MAX_EDGES)
        .expect("oracle columns stay within the cap");
    BigInt::from(trees.iter().filter(|t| pred(t)).count())
}

fn sum_over_trees(n: i64, f: impl Fn(&crate::tree_core::OrderedTree) -> usize) -> BigInt {
    let trees = gen_trees_with_cap(n as usize, ORACLE_MAX_EDGES)
        .expect("oracle columns stay within the cap");
    BigInt::from(trees.iter().map(|t| f(t)).sum::<usize>())
}

/// `<tsts...ts>` with r repetitions: the root pattern whose occurrences
/// are ordered forests of r nonleaf trees.
fn forest_root_pattern(r: i64) -> Pattern {
    let mut atoms = Vec::new();
    for _ in 0..r {
        atoms.push(PatternAtom::LightTriangle);
        atoms.push(PatternAtom::LightEllipsis);
    }
    Pattern::composite(atoms).expect("r >= 1")
}

fn forests_oracle(n: i64, r: i64) -> BigInt {
    oracle_root_count(&forest_root_pattern(r), n as usize, RootMode::RootWitnessTotal)
        .expect("within cap")
}

static REGISTRY: &[SequenceDef] = &[
    SequenceDef {
        id: "catalan",
        description: "ordered trees with n edges",
        offset: 0,
        shape: Shape::Scalar,
        generator: |n, _| formulas::catalan(n),
        oracle: Some(|n, _| count_trees(n, |_| true)),
        reference: include_str!("../data/catalan.txt"),
    },
    SequenceDef {
        id: "fine",
        description: "protected (stump-free) trees with n edges",
        offset: 1,
        shape: Shape::Scalar,
        generator: |n, _| formulas::fine(n),
        oracle: Some(|n, _| count_trees(n, |t| tree_stats(t).stumps == 0)),
        reference: include_str!("../data/fine.txt"),
    },
    SequenceDef {
        id: "unprotected_trees",
        description: "trees with n edges and at least one stump",
        offset: 2,
        shape: Shape::Scalar,
        generator: |n, _| formulas::unprotected_trees(n).expect("offset starts at n = 2"),
        oracle: Some(|n, _| count_trees(n, |t| tree_stats(t).stumps > 0)),
        reference: include_str!("../data/unprotected_trees.txt"),
    },
    SequenceDef {
        id: "no_protected",
        description: "trees with n edges and no protected nodes",
        offset: 1,
        shape: Shape::Scalar,
        generator: |n, _| formulas::trees_no_protected(n),
        oracle: Some(|n, _| count_trees(n, |t| tree_stats(t).protected_nodes == 0)),
        reference: include_str!("../data/no_protected.txt"),
    },
    SequenceDef {
        id: "stump_total",
        description: "total stumps over all trees with n edges",
        offset: 0,
        shape: Shape::Scalar,
        generator: |n, _| formulas::stumps_total(n),
        oracle: Some(|n, _| sum_over_trees(n, |t| tree_stats(t).stumps)),
        reference: include_str!("../data/stump_total.txt"),
    },
    SequenceDef {
        id: "stump_total_shifted",
        description: "shifted stump-total variant (1/(n+1)) C(2n+2,n); \
                      disagrees with the brute-force totals",
        offset: 0,
        shape: Shape::Scalar,
        generator: |n, _| formulas::stumps_total_shifted(n),
        oracle: Some(|n, _| sum_over_trees(n, |t| tree_stats(t).stumps)),
        reference: include_str!("../data/stump_total_shifted.txt"),
    },
    SequenceDef {
        id: "leaves_total",
        description: "total leaves over all trees with n edges",
        offset: 1,
        shape: Shape::Scalar,
        generator: |n, _| formulas::binom(2 * n - 1, n - 1),
        oracle: Some(|n, _| sum_over_trees(n, |t| tree_stats(t).leaves)),
        reference: include_str!("../data/leaves_total.txt"),
    },
    SequenceDef {
        id: "forests_total",
        description: "ordered forests of nonleaf trees with n edges altogether",
        offset: 1,
        shape: Shape::Scalar,
        generator: |n, _| formulas::binom(2 * n - 1, n),
        oracle: Some(|n, _| (1..=n).map(|r| forests_oracle(n, r)).sum()),
        reference: include_str!("../data/forests_total.txt"),
    },
    SequenceDef {
        id: "hill_free_no_level2",
        description: "3-protected trees with n edges (hill-free paths with no level-2 peaks)",
        offset: 3,
        shape: Shape::Scalar,
        generator: |n, _| formulas::three_protected(n).expect("offset starts at n = 3"),
        oracle: Some(|n, _| count_trees(n, |t| is_k_protected(t, 3))),
        reference: include_str!("../data/hill_free_no_level2.txt"),
    },
    SequenceDef {
        id: "catalan_triangle",
        description: "ordered forests of r nonleaf trees with n edges (rows n, r = 1..n)",
        offset: 1,
        shape: Shape::Triangle { first: |_| 1, last: |n| n },
        generator: |n, r| formulas::forests(n, r).expect("1 <= r <= n by row shape"),
        oracle: Some(forests_oracle),
        reference: include_str!("../data/catalan_triangle.txt"),
    },
    SequenceDef {
        id: "narayana",
        description: "trees with n edges and exactly l leaves (rows n, l = 1..n)",
        offset: 1,
        shape: Shape::Triangle { first: |_| 1, last: |n| n },
        generator: formulas::narayana,
        oracle: Some(|n, l| count_trees(n, |t| tree_stats(t).leaves == l as usize)),
        reference: include_str!("../data/narayana.txt"),
    },
    SequenceDef {
        id: "protected_by_r",
        description: "trees with n edges and r protected nodes (rows n, r = 0..n-1)",
        offset: 1,
        shape: Shape::Triangle { first: |_| 0, last: |n| (n - 1).max(0) },
        generator: formulas::trees_with_r_protected,
        oracle: Some(|n, r| count_trees(n, |t| tree_stats(t).protected_nodes == r as usize)),
        reference: include_str!("../data/protected_by_r.txt"),
    },
    SequenceDef {
        id: "unprotected_by_s",
        description: "trees with n edges and s unprotected nodes (rows n, s = 0..n)",
        offset: 1,
        shape: Shape::Triangle { first: |_| 0, last: |n| n },
        generator: formulas::trees_with_s_unprotected,
        oracle: Some(|n, s| {
            count_trees(n, |t| tree_stats(t).unprotected_internal_nodes == s as usize)
        }),
        reference: include_str!("../data/unprotected_by_s.txt"),
    },
    SequenceDef {
        id: "stumps_by_r",
        description: "trees with n edges and r stumps (rows n, r = 0..n)",
        offset: 0,
        shape: Shape::Triangle { first: |_| 0, last: |n| n },
        generator: formulas::trees_with_r_stumps,
        oracle: Some(|n, r| count_trees(n, |t| tree_stats(t).stumps == r as usize)),
        reference: include_str!("../data/stumps_by_r.txt"),
    },
];
