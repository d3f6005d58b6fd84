use std::fmt::Write as _;
use treepat::sequences::{lookup, emit};

fn main() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let specs: &[(&str, usize)] = &[
        ("catalan", 14),
        ("fine", 13),
        ("unprotected_trees", 12),
        ("no_protected", 12),
        ("stump_total", 13),
        ("stump_total_shifted", 13),
        ("leaves_total", 12),
        ("forests_total", 12),
        ("hill_free_no_level2", 11),
        ("catalan_triangle", 36),
        ("narayana", 36),
        ("protected_by_r", 36),
        ("unprotected_by_s", 44),
        ("stumps_by_r", 45),
    ];
    for &(id, count) in specs {
        let def = lookup(id).unwrap();
        let mut out = String::new();
        writeln!(out, "# {}: {}", id, def.description.split_whitespace().collect::<Vec<_>>().join(" ")).unwrap();
        writeln!(out, "# frozen from the generator; one term per line").unwrap();
        for t in emit(id, count).unwrap() {
            writeln!(out, "{t}").unwrap();
        }
        std::fs::write(dir.join(format!("{id}.txt")), out).unwrap();
        println!("wrote {id}");
    }
}
