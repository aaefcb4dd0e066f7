//! The five-variable reference system against a hand-written loop.

use tsforge_core::sim::{compute_anomalies, compute_labels, compute_values, warmup_for};
use tsforge_core::{parse_expression, AnomalySpec, DependencyGraph, Expr, Label, MutationStrategy};
use tsforge_core::anomaly::AnomalyWindow;

const SOURCES: [&str; 5] = [
    "cos((t-2)*x1[t-3])",
    "cos(9*(t-4))/sin(9)",
    "(cos((t-2)*x4[t-2]) + 2*x4[t-4] - x3[t-3]/4)/10",
    "sin(t-3) - integral(x2,3,1) + x3[t-3]/2",
    "sin(6*(t-4)) + (3*cos(t-1)-2)^2",
];

fn equations() -> Vec<Expr> {
    SOURCES.iter().map(|s| parse_expression(s, 5).unwrap()).collect()
}

/// Straight transcription of the five equations with warm-up `w`; reads
/// before `-w` are zero.
fn brute_force(len: usize, w: usize) -> Vec<[f64; 5]> {
    let mut x = vec![[0.0f64; 5]; w + len];
    let at = |x: &Vec<[f64; 5]>, t: i64, v: usize| -> f64 {
        let i = t + w as i64;
        if i < 0 { 0.0 } else { x[i as usize][v] }
    };
    for i in 0..w + len {
        let t = i as i64 - w as i64;
        let tf = t as f64;
        let x0 = ((tf - 2.0) * at(&x, t - 3, 1)).cos();
        let x1 = (9.0 * (tf - 4.0)).cos() / 9f64.sin();
        let x2 = (((tf - 2.0) * at(&x, t - 2, 4)).cos() + 2.0 * at(&x, t - 4, 4) - at(&x, t - 3, 3) / 4.0) / 10.0;
        let x3 = (tf - 3.0).sin() - integral(|k| at(&x, t - k, 2)) + at(&x, t - 3, 3) / 2.0;
        // powers keep the sign of their base
        let base = 3.0 * (tf - 1.0).cos() - 2.0;
        let x4 = (6.0 * (tf - 4.0)).sin() + base * base.abs();
        x[i] = [x0, x1, x2, x3, x4];
    }
    x.split_off(w)
}

fn integral(x2: impl Fn(i64) -> f64) -> f64 {
    (1..3).map(|k| (x2(k) + x2(k + 1)) / 2.0 * (x2(k) - x2(k + 1))).sum()
}

/// Contaminated x3 when its divisor is 5 on `[a, b)`: it reads its own
/// contaminated past and the clean x2 (x2 never sees the corruption because
/// x3 -> x2 is blocked).
fn contaminated_x3(clean: &[[f64; 5]], a: usize, b: usize) -> Vec<f64> {
    let mut x3: Vec<f64> = clean.iter().map(|r| r[3]).collect();
    for t in a..clean.len() {
        let tf = t as f64;
        let x2 = |k: i64| clean[(t as i64 - k) as usize][2];
        let divisor = if t < b { 5.0 } else { 2.0 };
        x3[t] = (tf - 3.0).sin() - integral(x2) + x3[t - 3] / divisor;
    }
    x3
}

#[test]
fn warmup_is_the_largest_lag() {
    assert_eq!(warmup_for(&equations()), 4);
}

#[test]
fn matches_loop_oracle() {
    let eq = equations();
    let w = warmup_for(&eq);
    let m = compute_values(&eq, 200, w);
    let want = brute_force(200, w);
    for (t, row) in want.iter().enumerate() {
        for j in 0..5 {
            assert!((m.get(t, j) - row[j]).abs() <= 1e-9, "t={t} x{j}: {} vs {}", m.get(t, j), row[j]);
        }
    }
}

#[test]
fn anomaly_track_matches_loop_oracle() {
    let eq = equations();
    let w = warmup_for(&eq);
    let mut graph = DependencyGraph::from_equations(&eq);
    for e in graph.edges_mut() {
        e.propagates = !(e.src == 3 && e.dst == 2);
    }
    let anomalies = [AnomalySpec {
        window: AnomalyWindow { var: 3, t_start: 106, t_end: 137 },
        strategy: MutationStrategy::Manual,
        mutated: parse_expression("sin(t-3) - integral(x2,3,1) + x3[t-3]/5", 5).unwrap(),
    }];
    let tracks = compute_anomalies(&eq, &graph, &anomalies, 200, 100, w);
    let clean = brute_force(200, w);
    let dirty = contaminated_x3(&clean, 106, 137);
    for t in 0..200 {
        for j in 0..5 {
            let want = if j == 3 { dirty[t] } else { clean[t][j] };
            assert!((tracks.contaminated.get(t, j) - want).abs() <= 1e-9, "t={t} x{j}");
            assert!((tracks.clean.get(t, j) - clean[t][j]).abs() <= 1e-9, "t={t} x{j}");
        }
    }
    let labels = compute_labels(&eq, &graph, &anomalies, 100, 200);
    for r in 0..100 {
        let t = 100 + r;
        let x3 = labels.get(r, 3);
        if (106..137).contains(&t) {
            assert_eq!(x3, Label::Anomalous);
        } else if t >= 137 {
            // every step reads the corrupted self three steps back
            assert_eq!(x3, Label::ParentPropagated, "t={t}");
        } else {
            assert_eq!(x3, Label::Normal, "t={t}");
        }
        let x2 = labels.get(r, 2);
        let reads_window = t >= 109;
        assert_eq!(x2 == Label::ParentNotPropagated, reads_window, "t={t}");
    }
}
