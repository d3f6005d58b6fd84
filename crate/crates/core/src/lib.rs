//! Exact counting of non-overlapping tree-pattern occurrences among
//! ordered (plane) trees, with closed-form evaluation cross-checked
//! against brute-force enumeration.
//!
//! The crate is organized as:
//! - [`tree_core`]: ordered trees, bracket notation, exhaustive
//!   generation, the Dyck-path bijection, structural statistics;
//! - [`pattern_lang`]: the pattern AST, its ASCII syntax, metrics;
//! - [`oracle`]: ground-truth counting by exhaustive matching;
//! - [`formulas`]: arbitrary-precision closed forms;
//! - [`sequences`]: named sequences and the cross-check harness;
//! - [`cli`]: the command-line front end.

pub mod cli;
pub mod formulas;
pub mod oracle;
pub mod pattern_lang;
pub mod sequences;
pub mod tree_core;

use num_bigint::BigInt;

use formulas::QueryParams;
use oracle::CountQuery;
use pattern_lang::metrics;

/// Closed-form count for a query, dispatching empty multisets to the
/// leaf-only formula.
pub fn count_query(q: &CountQuery) -> BigInt {
    let n = q.edges as i64;
    let l = q.loose_leaves as i64;
    if q.total_multiplicity() == 0 {
        return formulas::count_leaf_only(n, l);
    }
    let params = QueryParams::new(n, l, q.patterns().map(|(p, m)| (metrics(p), m)));
    formulas::count_multiset(&params).expect("nonzero multiplicity checked above")
}
