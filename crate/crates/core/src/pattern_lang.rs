//! The tree-pattern language: five basic shapes plus composites, an
//! ASCII surface syntax, per-pattern metrics, and an empirical
//! unambiguity check.
//!
//! Token alphabet:
//!   `o` a leaf,
//!   `t` a light triangle (matches any subtree),
//!   `T` a dark triangle (matches any nonleaf subtree),
//!   `s` a light ellipsis (matches any run of subtrees),
//!   `S` a dark ellipsis (matches any run of nonleaf subtrees),
//!   `<` `>` delimit a composite.
//!
//! A top-level pattern is either `o` or a composite with at least one
//! component; `<>` and the bare triangle/ellipsis tokens are only legal
//! inside composites.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::oracle;
use crate::tree_core::{gen_trees_with_cap, NodeId, OrderedTree, TreeError};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "children", rename_all = "snake_case")]
pub enum PatternAtom {
    Lozenge,
    LightTriangle,
    DarkTriangle,
    LightEllipsis,
    DarkEllipsis,
    Composite(Vec<PatternAtom>),
}

impl PatternAtom {
    fn render_into(&self, out: &mut String) {
        match self {
            PatternAtom::Lozenge => out.push('o'),
            PatternAtom::LightTriangle => out.push('t'),
            PatternAtom::DarkTriangle => out.push('T'),
            PatternAtom::LightEllipsis => out.push('s'),
            PatternAtom::DarkEllipsis => out.push('S'),
            PatternAtom::Composite(children) => {
                out.push('<');
                for c in children {
                    c.render_into(out);
                }
                out.push('>');
            }
        }
    }
}

/// A pattern constrained to the top-level grammar: the bare leaf `o`, or
/// a composite with one or more components.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Pattern {
    root: PatternAtom,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PatternError {
    #[error("empty composite `<>` is not allowed at top level; use `o`")]
    TopLevelEmptyComposite,
    #[error("token {0:?} is only allowed inside a composite")]
    TopLevelNonComposite(char),
    #[error("unbalanced brackets at byte {0}")]
    Unbalanced(usize),
    #[error("unknown token {0:?} at byte {1}")]
    UnknownToken(char, usize),
    #[error("empty input")]
    Empty,
    #[error("trailing input after the pattern at byte {0}")]
    Trailing(usize),
    #[error("expected a composite pattern, got the bare leaf `o`")]
    NotComposite,
}

impl Pattern {
    /// The bare leaf pattern.
    pub fn leaf() -> Self {
        Pattern { root: PatternAtom::Lozenge }
    }

    /// A composite pattern; rejects an empty component list.
    pub fn composite(children: Vec<PatternAtom>) -> Result<Self, PatternError> {
        if children.is_empty() {
            return Err(PatternError::TopLevelEmptyComposite);
        }
        Ok(Pattern { root: PatternAtom::Composite(children) })
    }

    pub fn root(&self) -> &PatternAtom {
        &self.root
    }

    pub fn is_composite(&self) -> bool {
        matches!(self.root, PatternAtom::Composite(_))
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        self.root.render_into(&mut out);
        out
    }
}

impl std::fmt::Display for Pattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.render())
    }
}

/// Symbol bundle of one pattern: `v` explicit nodes, `a` light
/// triangles, `b` light ellipses, `c` dark triangles, `d` dark ellipses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct PatternMetrics {
    pub v: i64,
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl PatternMetrics {
    pub fn add(self, other: PatternMetrics) -> PatternMetrics {
        PatternMetrics {
            v: self.v + other.v,
            a: self.a + other.a,
            b: self.b + other.b,
            c: self.c + other.c,
            d: self.d + other.d,
        }
    }
}

pub fn parse_pattern(text: &str) -> Result<Pattern, PatternError> {
    let bytes: Vec<(usize, char)> = text
        .char_indices()
        .filter(|(_, c)| !c.is_whitespace())
        .collect();
    if bytes.is_empty() {
        return Err(PatternError::Empty);
    }
    let (atom, rest) = parse_atom(&bytes, 0)?;
    if rest != bytes.len() {
        return Err(PatternError::Trailing(bytes[rest].0));
    }
    match atom {
        PatternAtom::Lozenge => Ok(Pattern::leaf()),
        PatternAtom::Composite(children) => {
            if children.is_empty() {
                Err(PatternError::TopLevelEmptyComposite)
            } else {
                Ok(Pattern { root: PatternAtom::Composite(children) })
            }
        }
        PatternAtom::LightTriangle => Err(PatternError::TopLevelNonComposite('t')),
        PatternAtom::DarkTriangle => Err(PatternError::TopLevelNonComposite('T')),
        PatternAtom::LightEllipsis => Err(PatternError::TopLevelNonComposite('s')),
        PatternAtom::DarkEllipsis => Err(PatternError::TopLevelNonComposite('S')),
    }
}

fn parse_atom(tokens: &[(usize, char)], pos: usize) -> Result<(PatternAtom, usize), PatternError> {
    let (byte, ch) = tokens[pos];
    match ch {
        'o' => Ok((PatternAtom::Lozenge, pos + 1)),
        't' => Ok((PatternAtom::LightTriangle, pos + 1)),
        'T' => Ok((PatternAtom::DarkTriangle, pos + 1)),
        's' => Ok((PatternAtom::LightEllipsis, pos + 1)),
        'S' => Ok((PatternAtom::DarkEllipsis, pos + 1)),
        '<' => {
            let mut children = Vec::new();
            let mut p = pos + 1;
            loop {
                match tokens.get(p) {
                    None => return Err(PatternError::Unbalanced(byte)),
                    Some(&(_, '>')) => return Ok((PatternAtom::Composite(children), p + 1)),
                    Some(_) => {
                        let (child, next) = parse_atom(tokens, p)?;
                        children.push(child);
                        p = next;
                    }
                }
            }
        }
        '>' => Err(PatternError::Unbalanced(byte)),
        c => Err(PatternError::UnknownToken(c, byte)),
    }
}

/// Node and shape counts by structural recursion; triangles and ellipses
/// contribute no nodes.
pub fn metrics(p: &Pattern) -> PatternMetrics {
    atom_metrics(&p.root)
}

fn atom_metrics(atom: &PatternAtom) -> PatternMetrics {
    match atom {
        PatternAtom::Lozenge => PatternMetrics { v: 1, ..Default::default() },
        PatternAtom::LightTriangle => PatternMetrics { a: 1, ..Default::default() },
        PatternAtom::LightEllipsis => PatternMetrics { b: 1, ..Default::default() },
        PatternAtom::DarkTriangle => PatternMetrics { c: 1, ..Default::default() },
        PatternAtom::DarkEllipsis => PatternMetrics { d: 1, ..Default::default() },
        PatternAtom::Composite(children) => children
            .iter()
            .map(atom_metrics)
            .fold(PatternMetrics { v: 1, ..Default::default() }, PatternMetrics::add),
    }
}

/// Wraps a pattern as `<s P s>`, anchoring it strictly below a root:
/// the result matches wherever `P` matches at a nonroot node.
pub fn embed_in_root_context(p: &Pattern) -> Pattern {
    Pattern {
        root: PatternAtom::Composite(vec![
            PatternAtom::LightEllipsis,
            p.root.clone(),
            PatternAtom::LightEllipsis,
        ]),
    }
}

/// Replaces every dark triangle by `<ts>`; the rewritten pattern matches
/// the same subtrees (useful for single-pattern queries where dark
/// triangles are unnecessary).
pub fn rewrite_dark_triangles(p: &Pattern) -> Pattern {
    fn walk(atom: &PatternAtom) -> PatternAtom {
        match atom {
            PatternAtom::DarkTriangle => PatternAtom::Composite(vec![
                PatternAtom::LightTriangle,
                PatternAtom::LightEllipsis,
            ]),
            PatternAtom::Composite(children) => {
                PatternAtom::Composite(children.iter().map(walk).collect())
            }
            other => other.clone(),
        }
    }
    Pattern { root: walk(&p.root) }
}

/// Result of an empirical unambiguity check: sound only for trees with
/// at most `verified_up_to` edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnambiguityReport {
    pub unambiguous: bool,
    pub verified_up_to: usize,
    /// A tree and anchor node admitting two witnesses, when ambiguous.
    pub counterexample: Option<(OrderedTree, NodeId)>,
}

/// Checks that the pattern admits at most one witness per anchor node in
/// every tree with at most `n_max` edges.
pub fn check_unambiguous(p: &Pattern, n_max: usize) -> Result<UnambiguityReport, TreeError> {
    for n in 0..=n_max {
        for t in gen_trees_with_cap(n, n_max)? {
            let flat = t.flatten();
            let mut per_anchor = vec![0usize; flat.len()];
            for w in oracle::witnesses(p, &t) {
                per_anchor[w.anchor.0] += 1;
                if per_anchor[w.anchor.0] > 1 {
                    return Ok(UnambiguityReport {
                        unambiguous: false,
                        verified_up_to: n_max,
                        counterexample: Some((t.clone(), w.anchor)),
                    });
                }
            }
        }
    }
    Ok(UnambiguityReport { unambiguous: true, verified_up_to: n_max, counterexample: None })
}
