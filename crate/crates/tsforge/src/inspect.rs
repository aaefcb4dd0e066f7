//! Human-readable summary of a manifest.

use std::fmt::Write as _;

use crate::manifest::Manifest;

pub fn summary(m: &Manifest) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "mode {}  d {}  train {}  test {}  seed {}  warm-up {}",
        m.mode, m.d, m.train_length, m.test_length, m.seed, m.warmup
    );
    let _ = writeln!(s, "\ncommunities");
    for (i, c) in m.communities.iter().enumerate() {
        let members: Vec<String> = c.iter().map(|v| format!("x{v}")).collect();
        let _ = writeln!(s, "  {i}: {}", members.join(" "));
    }
    let exo: Vec<String> = m
        .nodes
        .iter()
        .filter(|n| n.exogenous)
        .map(|n| format!("x{}", n.id))
        .collect();
    let _ = writeln!(s, "exogenous: {}", exo.join(" "));
    let _ = writeln!(s, "\nedges");
    for e in &m.edges {
        let flag = if e.propagates { "propagates" } else { "blocked" };
        let _ = writeln!(s, "  x{} -> x{}  {flag}", e.src, e.dst);
    }
    let _ = writeln!(s, "\nequations");
    for (i, e) in m.equations.iter().enumerate() {
        let _ = writeln!(s, "  x{i} = {e}");
    }
    let _ = writeln!(s, "\nanomalies");
    if m.anomalies.is_empty() {
        let _ = writeln!(s, "  none");
    } else {
        let _ = writeln!(
            s,
            "  {:>4}  {:>8}  {:>8}  {:<16}  equation",
            "var", "start", "end", "strategy"
        );
        for a in &m.anomalies {
            let _ = writeln!(
                s,
                "  {:>4}  {:>8}  {:>8}  {:<16}  {}",
                format!("x{}", a.var),
                a.t_start,
                a.t_end,
                a.strategy,
                a.mutated_equation
            );
        }
    }
    let [n0, n1, n2, n3] = m.label_counts;
    let _ = writeln!(s, "\nlabels  0: {n0}  1: {n1}  2: {n2}  3: {n3}");
    s
}
