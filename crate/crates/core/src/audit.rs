//! Post-hoc checks of a finished run against the labeling contract.
//!
//! The checks trace every label back to the data flow instead of
//! recomputing labels, so they also serve as an independent oracle in tests.

use alloc::vec::Vec;

use crate::anomaly::EFFECT_THRESHOLD;
use crate::expr::CLAMP_BOUND;
use crate::matrix::Label;
use crate::sim::GenerationResult;

/// One broken guarantee. `t` is a global timestep.
#[derive(Clone, Debug, PartialEq)]
pub enum AuditViolation {
    /// A label-0 or label-2 cell whose clean and contaminated values differ.
    TrackMismatch { t: usize, var: usize },
    /// A label-1 cell outside every window, or a window cell not labeled 1.
    WindowLabel { t: usize, var: usize },
    /// A window whose tracks never differ by more than the effect threshold.
    IneffectiveWindow { index: usize },
    /// A label-3 cell without a corrupted parent read through a propagating
    /// edge.
    UntracedPropagated { t: usize, var: usize },
    /// A label-2 cell without a corrupted parent read through a
    /// non-propagating edge, or with a propagating one.
    UntracedShielded { t: usize, var: usize },
    /// A label-0 cell that reads a corrupted parent.
    MissedParent { t: usize, var: usize },
    /// A window starting before the test segment or running past its end.
    WindowOutsideTest { index: usize },
    /// Two windows on one variable overlap.
    OverlappingWindows { first: usize, second: usize },
    /// A delivered value that is not finite or exceeds the clamp bound.
    OutOfBounds { t: usize, var: usize },
    /// Shapes of the delivered matrices disagree with the run lengths.
    Shape,
}

/// Lists every violated guarantee of `result`; empty when the run is sound.
pub fn audit(result: &GenerationResult) -> Vec<AuditViolation> {
    let mut out = Vec::new();
    let d = result.d();
    let t0 = result.train_length;
    let n = result.test_length;
    let labels = &result.labels;
    if result.train.rows() != t0
        || result.test.rows() != n
        || result.clean_test.rows() != n
        || result.contaminated_test.rows() != n
        || labels.rows() != n
        || [result.train.cols(), result.test.cols(), labels.cols()]
            .iter()
            .any(|&c| c != d)
    {
        out.push(AuditViolation::Shape);
        return out;
    }

    for (i, a) in result.anomalies.iter().enumerate() {
        let w = a.window;
        if w.t_start < t0 || w.t_end > t0 + n || w.t_start >= w.t_end || w.var >= d {
            out.push(AuditViolation::WindowOutsideTest { index: i });
            continue;
        }
        for (k, b) in result.anomalies[..i].iter().enumerate() {
            if b.window.overlaps(&w) {
                out.push(AuditViolation::OverlappingWindows { first: k, second: i });
            }
        }
        let effective = (w.t_start..w.t_end).any(|t| {
            let r = t - t0;
            libm::fabs(result.clean_test.get(r, w.var) - result.contaminated_test.get(r, w.var))
                > EFFECT_THRESHOLD
        });
        if !effective {
            out.push(AuditViolation::IneffectiveWindow { index: i });
        }
    }

    let in_window = |t: usize, j: usize| {
        result
            .anomalies
            .iter()
            .any(|a| a.window.var == j && a.window.contains(t))
    };
    let reads: Vec<_> = result.equations.iter().map(|e| e.read_set()).collect();

    for r in 0..n {
        let t = t0 + r;
        for j in 0..d {
            let label = labels.get(r, j);
            if (label == Label::Anomalous) != in_window(t, j) {
                out.push(AuditViolation::WindowLabel { t, var: j });
                continue;
            }
            let same = result.clean_test.get(r, j).to_bits()
                == result.contaminated_test.get(r, j).to_bits();
            let mut through_propagating = false;
            let mut through_shielded = false;
            for &(p, lag) in &reads[j] {
                if lag > r || !labels.get(r - lag, p).is_abnormal() {
                    continue;
                }
                let propagates = p == j
                    || result
                        .graph
                        .edges()
                        .iter()
                        .any(|e| e.src == p && e.dst == j && e.propagates);
                if propagates {
                    through_propagating = true;
                } else {
                    through_shielded = true;
                }
            }
            match label {
                Label::Anomalous => {}
                Label::ParentPropagated => {
                    if !through_propagating {
                        out.push(AuditViolation::UntracedPropagated { t, var: j });
                    }
                }
                Label::ParentNotPropagated => {
                    if through_propagating || !through_shielded {
                        out.push(AuditViolation::UntracedShielded { t, var: j });
                    }
                    if !same {
                        out.push(AuditViolation::TrackMismatch { t, var: j });
                    }
                }
                Label::Normal => {
                    if through_propagating || through_shielded {
                        out.push(AuditViolation::MissedParent { t, var: j });
                    }
                    if !same {
                        out.push(AuditViolation::TrackMismatch { t, var: j });
                    }
                }
            }
        }
    }

    for (offset, m) in [(0, &result.train), (t0, &result.test)] {
        for r in 0..m.rows() {
            for (j, v) in m.row(r).iter().enumerate() {
                if !v.is_finite() || libm::fabs(*v) > CLAMP_BOUND {
                    out.push(AuditViolation::OutOfBounds { t: offset + r, var: j });
                }
            }
        }
    }
    out
}
