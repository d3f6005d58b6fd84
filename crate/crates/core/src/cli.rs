//! Command-line front end. Exit codes: 0 success, 1 verification or
//! cross-check mismatch, 2 argument or pattern parse error, 3 size cap
//! exceeded.

use std::ffi::OsString;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::json;

use crate::formulas;
use crate::oracle::{self, CountQuery};
use crate::pattern_lang::{metrics, parse_pattern, Pattern};
use crate::sequences;
use crate::tree_core::{gen_trees_with_cap, render_tree, tree_stats, TreeError, DEFAULT_MAX_EDGES};
use crate::count_query;

/// Environment variable overriding the generation/oracle size cap.
pub const CAP_ENV: &str = "TREEPAT_MAX_EDGES";

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Parser)]
#[command(name = "treepat", version, about = "Count tree-pattern occurrences in ordered trees")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Plain)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Closed-form count of non-overlapping occurrences.
    Count {
        /// Pattern spec, repeatable; append xK for multiplicity (e.g. '<so>x2').
        #[arg(short = 'p', long = "pattern")]
        patterns: Vec<String>,
        /// Number of loose leaf patterns.
        #[arg(short = 'l', long = "leaves", default_value_t = 0)]
        leaves: usize,
        /// Edge count.
        #[arg(short = 'n', long = "edges")]
        edges: usize,
    },
    /// Brute-force count over all generated trees.
    Oracle {
        #[arg(short = 'p', long = "pattern")]
        patterns: Vec<String>,
        #[arg(short = 'l', long = "leaves", default_value_t = 0)]
        leaves: usize,
        #[arg(short = 'n', long = "edges")]
        edges: usize,
        /// Worker threads for the per-tree aggregation.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Compare formula and brute force for every n up to a bound.
    Verify {
        #[arg(short = 'p', long = "pattern")]
        patterns: Vec<String>,
        #[arg(short = 'l', long = "leaves", default_value_t = 0)]
        leaves: usize,
        #[arg(long = "n-max")]
        n_max: usize,
    },
    /// Root-anchored enumeration of a single composite pattern.
    Root {
        #[arg(short = 'p', long = "pattern")]
        pattern: String,
        #[arg(short = 'n', long = "edges")]
        edges: usize,
    },
    /// Per-tree and aggregate structural statistics.
    Stats {
        #[arg(short = 'n', long = "edges")]
        edges: usize,
    },
    /// Emit terms of a named sequence, or cross-check it.
    Sequence {
        id: String,
        #[arg(long, default_value_t = 10)]
        terms: usize,
        /// Print one triangle row instead of flat terms.
        #[arg(long)]
        row: Option<i64>,
        /// Cross-check formula vs. brute force vs. vendored reference
        /// up to this n; exits 1 on any mismatch.
        #[arg(long)]
        crosscheck: Option<i64>,
    },
    /// Print all trees with n edges in canonical order.
    Gen {
        #[arg(short = 'n', long = "edges")]
        edges: usize,
    },
}

/// What a CLI invocation produced; `main` prints and exits with it.
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn parse(message: impl Into<String>) -> Self {
        Failure { code: EXIT_PARSE, message: message.into() }
    }
}

impl From<TreeError> for Failure {
    fn from(e: TreeError) -> Self {
        let code = match e {
            TreeError::CapExceeded { .. } => EXIT_CAP,
            _ => EXIT_PARSE,
        };
        Failure { code, message: e.to_string() }
    }
}

pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // help and version land on stdout with exit 0
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let rendered = e.render().to_string();
            return if code == EXIT_OK {
                Outcome { code, stdout: rendered, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: rendered }
            };
        }
    };
    match dispatch(cli) {
        Ok((code, stdout)) => Outcome { code, stdout, stderr: String::new() },
        Err(f) => Outcome { code: f.code, stdout: String::new(), stderr: format!("error: {}\n", f.message) },
    }
}

fn cap() -> usize {
    std::env::var(CAP_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_EDGES)
}

#[derive(Serialize)]
struct QuerySpec {
    patterns: Vec<PatternSpec>,
    loose_leaves: usize,
}

#[derive(Serialize)]
struct PatternSpec {
    pattern: String,
    multiplicity: u32,
}

fn parse_pattern_arg(spec: &str) -> Result<(Pattern, u32), Failure> {
    let (text, mult) = match spec.rfind('x') {
        Some(pos) if spec[pos + 1..].chars().all(|c| c.is_ascii_digit())
            && !spec[pos + 1..].is_empty() =>
        {
            let mult: u32 = spec[pos + 1..]
                .parse()
                .map_err(|_| Failure::parse(format!("bad multiplicity in {spec:?}")))?;
            (&spec[..pos], mult)
        }
        _ => (spec, 1),
    };
    let pattern = parse_pattern(text).map_err(|e| Failure::parse(format!("pattern {text:?}: {e}")))?;
    Ok((pattern, mult))
}

fn build_query(specs: &[String], leaves: usize, edges: usize) -> Result<CountQuery, Failure> {
    let mut entries = Vec::new();
    for spec in specs {
        entries.push(parse_pattern_arg(spec)?);
    }
    CountQuery::new(entries, leaves, edges).map_err(|e| Failure::parse(e.to_string()))
}

fn query_spec(q: &CountQuery) -> QuerySpec {
    QuerySpec {
        patterns: q
            .patterns()
            .map(|(p, m)| PatternSpec { pattern: p.render(), multiplicity: m })
            .collect(),
        loose_leaves: q.loose_leaves,
    }
}

fn dispatch(cli: Cli) -> Result<(i32, String), Failure> {
    let format = cli.format;
    match cli.cmd {
        Cmd::Count { patterns, leaves, edges } => {
            let q = build_query(&patterns, leaves, edges)?;
            let value = count_query(&q);
            Ok((EXIT_OK, render_count(&q, edges, &value, None, format)))
        }
        Cmd::Oracle { patterns, leaves, edges, jobs } => {
            let q = build_query(&patterns, leaves, edges)?;
            let value = oracle::oracle_count_with(&q, cap(), jobs)?;
            Ok((EXIT_OK, render_count(&q, edges, &value, None, format)))
        }
        Cmd::Verify { patterns, leaves, n_max } => {
            let mut lines = Vec::new();
            let mut rows = Vec::new();
            let mut all_match = true;
            for n in 0..=n_max {
                let q = build_query(&patterns, leaves, n)?;
                let formula = count_query(&q);
                let oracle_value = oracle::oracle_count_with(&q, cap(), 1)?;
                let matched = formula == oracle_value;
                all_match &= matched;
                lines.push(format!(
                    "n={n} formula={formula} oracle={oracle_value} match={matched}"
                ));
                rows.push((n, formula, oracle_value, matched));
            }
            let code = if all_match { EXIT_OK } else { EXIT_MISMATCH };
            let q = build_query(&patterns, leaves, 0)?;
            let out = match format {
                Format::Plain => lines.join("\n") + "\n",
                Format::Csv => {
                    let mut s = String::from("n,formula,oracle,match\n");
                    for (n, f, o, m) in &rows {
                        s.push_str(&format!("{n},{f},{o},{m}\n"));
                    }
                    s
                }
                Format::Json => {
                    let rows: Vec<_> = rows
                        .iter()
                        .map(|(n, f, o, m)| {
                            json!({
                                "n": n,
                                "formula": f.to_string(),
                                "oracle": o.to_string(),
                                "match": m,
                            })
                        })
                        .collect();
                    let doc = json!({
                        "query": serde_json::to_value(query_spec(&q)).unwrap(),
                        "rows": rows,
                        "match": all_match,
                    });
                    serde_json::to_string_pretty(&doc).unwrap() + "\n"
                }
            };
            Ok((code, out))
        }
        Cmd::Root { pattern, edges } => {
            let (p, mult) = parse_pattern_arg(&pattern)?;
            if mult != 1 {
                return Err(Failure::parse("root takes a single pattern without multiplicity"));
            }
            if !p.is_composite() {
                return Err(Failure::parse("root takes a composite pattern"));
            }
            let value = formulas::count_root(metrics(&p), edges as i64);
            let q = CountQuery::new([(p, 1)], 0, edges).map_err(|e| Failure::parse(e.to_string()))?;
            Ok((EXIT_OK, render_count(&q, edges, &value, None, format)))
        }
        Cmd::Stats { edges } => {
            let trees = gen_trees_with_cap(edges, cap())?;
            let stats: Vec<_> = trees.iter().map(tree_stats).collect();
            let leaves: usize = stats.iter().map(|s| s.leaves).sum();
            let stumps: usize = stats.iter().map(|s| s.stumps).sum();
            let protected: usize = stats.iter().map(|s| s.protected_nodes).sum();
            let out = match format {
                Format::Plain => {
                    let mut s = String::new();
                    for (t, st) in trees.iter().zip(&stats) {
                        s.push_str(&format!(
                            "{} leaves={} stumps={} protected={} unprotected={}\n",
                            render_tree(t),
                            st.leaves,
                            st.stumps,
                            st.protected_nodes,
                            st.unprotected_internal_nodes
                        ));
                    }
                    s.push_str(&format!("leaves={leaves} stumps={stumps} protected={protected}\n"));
                    s
                }
                Format::Csv => {
                    let mut s = String::from("tree,leaves,stumps,protected,unprotected\n");
                    for (t, st) in trees.iter().zip(&stats) {
                        s.push_str(&format!(
                            "{},{},{},{},{}\n",
                            render_tree(t),
                            st.leaves,
                            st.stumps,
                            st.protected_nodes,
                            st.unprotected_internal_nodes
                        ));
                    }
                    s
                }
                Format::Json => {
                    let per_tree: Vec<_> = trees
                        .iter()
                        .zip(&stats)
                        .map(|(t, st)| {
                            json!({ "tree": render_tree(t), "stats": serde_json::to_value(st).unwrap() })
                        })
                        .collect();
                    let doc = json!({
                        "n": edges,
                        "trees": per_tree,
                        "aggregate": { "leaves": leaves, "stumps": stumps, "protected": protected },
                    });
                    serde_json::to_string_pretty(&doc).unwrap() + "\n"
                }
            };
            Ok((EXIT_OK, out))
        }
        Cmd::Sequence { id, terms, row, crosscheck } => run_sequence(&id, terms, row, crosscheck, format),
        Cmd::Gen { edges } => {
            let trees = gen_trees_with_cap(edges, cap())?;
            let out = match format {
                Format::Json => {
                    let list: Vec<String> = trees.iter().map(render_tree).collect();
                    serde_json::to_string_pretty(&json!({ "n": edges, "trees": list })).unwrap() + "\n"
                }
                _ => {
                    let mut s = String::new();
                    for t in &trees {
                        s.push_str(&render_tree(t));
                        s.push('\n');
                    }
                    s
                }
            };
            Ok((EXIT_OK, out))
        }
    }
}

fn run_sequence(
    id: &str,
    terms: usize,
    row: Option<i64>,
    crosscheck: Option<i64>,
    format: Format,
) -> Result<(i32, String), Failure> {
    if let Some(n_max) = crosscheck {
        let report = sequences::crosscheck(id, n_max)
            .map_err(|e| Failure::parse(e.to_string()))?;
        let code = if report.ok { EXIT_OK } else { EXIT_MISMATCH };
        let out = match format {
            Format::Json => serde_json::to_string_pretty(&report).unwrap() + "\n",
            Format::Csv => {
                let mut s = String::from("index,formula,oracle,reference,ok\n");
                for r in &report.rows {
                    s.push_str(&format!(
                        "{},{},{},{},{}\n",
                        r.index,
                        r.formula,
                        r.oracle.as_ref().map(|v| v.to_string()).unwrap_or_default(),
                        r.reference.as_ref().map(|v| v.to_string()).unwrap_or_default(),
                        r.ok
                    ));
                }
                s
            }
            Format::Plain => {
                let mut s = String::new();
                for r in &report.rows {
                    s.push_str(&format!(
                        "{} formula={} oracle={} reference={} {}\n",
                        r.index,
                        r.formula,
                        r.oracle.as_ref().map(|v| v.to_string()).unwrap_or_else(|| "-".into()),
                        r.reference.as_ref().map(|v| v.to_string()).unwrap_or_else(|| "-".into()),
                        if r.ok { "ok" } else { "MISMATCH" }
                    ));
                }
                s.push_str(&format!("crosscheck {}: {}\n", id, if report.ok { "ok" } else { "MISMATCH" }));
                s
            }
        };
        return Ok((code, out));
    }
    let values: Vec<BigInt> = match row {
        Some(n) => {
            let def = sequences::lookup(id).map_err(|e| Failure::parse(e.to_string()))?;
            def.row(n).map_err(|e| Failure::parse(e.to_string()))?
        }
        None => sequences::emit(id, terms).map_err(|e| Failure::parse(e.to_string()))?,
    };
    let out = match format {
        Format::Json => {
            let list: Vec<String> = values.iter().map(|v| v.to_string()).collect();
            serde_json::to_string_pretty(&json!({ "id": id, "terms": list })).unwrap() + "\n"
        }
        Format::Csv => {
            let mut s = String::from("value\n");
            for v in &values {
                s.push_str(&format!("{v}\n"));
            }
            s
        }
        Format::Plain => {
            values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ") + "\n"
        }
    };
    Ok((EXIT_OK, out))
}

fn render_count(
    q: &CountQuery,
    edges: usize,
    formula: &BigInt,
    oracle_value: Option<&BigInt>,
    format: Format,
) -> String {
    match format {
        Format::Plain => format!("{formula}\n"),
        Format::Csv => match oracle_value {
            Some(o) => format!("n,formula,oracle\n{edges},{formula},{o}\n"),
            None => format!("n,value\n{edges},{formula}\n"),
        },
        Format::Json => {
            let mut doc = json!({
                "query": serde_json::to_value(query_spec(q)).unwrap(),
                "n": edges,
                "formula": formula.to_string(),
            });
            if let Some(o) = oracle_value {
                doc["oracle"] = json!(o.to_string());
                doc["match"] = json!(o == formula);
            }
            serde_json::to_string_pretty(&doc).unwrap() + "\n"
        }
    }
}
