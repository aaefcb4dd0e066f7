//! Stacked-panel SVG rendering of a dataset.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use tsforge_core::{GenerationResult, Label};

use crate::writer::write_atomic;

const WIDTH: f64 = 1000.0;
const PANEL: f64 = 110.0;
const GAP: f64 = 14.0;
const LEFT: f64 = 56.0;
const RIGHT: f64 = 12.0;
const TOP: f64 = 12.0;

#[derive(Debug, thiserror::Error)]
pub enum PlotError {
    #[error("variable x{var} does not exist (d = {d})")]
    UnknownVariable { var: usize, d: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Half-open runs of label-1 test rows for `var`, as global timesteps.
pub fn anomalous_spans(result: &GenerationResult, var: usize) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut open = None;
    for r in 0..=result.labels.rows() {
        let hit = r < result.labels.rows() && result.labels.get(r, var) == Label::Anomalous;
        match (hit, open) {
            (true, None) => open = Some(r),
            (false, Some(s)) => {
                spans.push((result.train_length + s, result.train_length + r));
                open = None;
            }
            _ => {}
        }
    }
    spans
}

fn series(result: &GenerationResult, var: usize) -> Vec<f64> {
    result
        .train
        .column(var)
        .chain(result.test.column(var))
        .collect()
}

/// Min/max envelope with at most two points per horizontal pixel.
fn envelope(values: &[f64], columns: usize) -> Vec<(f64, f64)> {
    let n = values.len();
    if n <= 2 * columns {
        return values.iter().enumerate().map(|(i, &v)| (i as f64, v)).collect();
    }
    let mut out = Vec::with_capacity(2 * columns);
    for c in 0..columns {
        let (a, b) = (c * n / columns, ((c + 1) * n / columns).max(c * n / columns + 1));
        let chunk = &values[a..b];
        let (imin, vmin) = chunk
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
        let (imax, vmax) = chunk
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        let mut pair = [((a + imin) as f64, vmin), ((a + imax) as f64, vmax)];
        pair.sort_by(|p, q| p.0.total_cmp(&q.0));
        out.extend(pair);
    }
    out
}

/// Renders the SVG document. An empty `variables` list plots everything.
pub fn render_svg(result: &GenerationResult, variables: &[usize]) -> Result<String, PlotError> {
    let d = result.d();
    if let Some(&var) = variables.iter().find(|&&v| v >= d) {
        return Err(PlotError::UnknownVariable { var, d });
    }
    let vars: Vec<usize> = if variables.is_empty() {
        (0..d).collect()
    } else {
        variables.to_vec()
    };
    let total = result.train_length + result.test_length;
    let height = TOP + vars.len() as f64 * (PANEL + GAP);
    let plot_w = WIDTH - LEFT - RIGHT;
    let x_of = |t: f64| LEFT + plot_w * t / (total.max(2) - 1) as f64;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (k, &var) in vars.iter().enumerate() {
        let top = TOP + k as f64 * (PANEL + GAP);
        let values = series(result, var);
        let (lo, hi) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        let (lo, hi) = if values.is_empty() {
            (-1.0, 1.0)
        } else if hi - lo < 1e-12 {
            (lo - 1.0, hi + 1.0)
        } else {
            (lo, hi)
        };
        let y_of = |v: f64| top + PANEL - PANEL * (v - lo) / (hi - lo);

        let _ = writeln!(s, r#"<g class="panel" data-var="{var}">"#);
        let _ = writeln!(
            s,
            r##"<rect x="{LEFT}" y="{top}" width="{plot_w}" height="{PANEL}" fill="none" stroke="#999"/>"##
        );
        for (a, b) in anomalous_spans(result, var) {
            let (x0, x1) = (x_of(a as f64), x_of(b as f64 - 1.0).max(x_of(a as f64) + 1.0));
            let _ = writeln!(
                s,
                r#"<rect class="anomaly" x="{x0:.2}" y="{top}" width="{:.2}" height="{PANEL}" fill="red" fill-opacity="0.25"/>"#,
                x1 - x0
            );
        }
        let xb = x_of(result.train_length as f64);
        let _ = writeln!(
            s,
            r##"<line x1="{xb:.2}" y1="{top}" x2="{xb:.2}" y2="{}" stroke="#555" stroke-dasharray="4 3"/>"##,
            top + PANEL
        );
        let mut points = String::new();
        for (t, v) in envelope(&values, plot_w as usize) {
            let _ = write!(points, "{:.2},{:.2} ", x_of(t), y_of(v));
        }
        let _ = writeln!(
            s,
            r##"<polyline fill="none" stroke="#1f4e9c" stroke-width="1" points="{}"/>"##,
            points.trim_end()
        );
        let _ = writeln!(
            s,
            r#"<text x="6" y="{:.2}">x{var}</text>"#,
            top + PANEL / 2.0
        );
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Writes the SVG to `out_path`. Variable ids are checked before anything
/// touches the file system.
pub fn emit_plot(result: &GenerationResult, variables: &[usize], out_path: &Path) -> Result<(), PlotError> {
    let svg = render_svg(result, variables)?;
    write_atomic(out_path, svg.as_bytes())?;
    Ok(())
}
