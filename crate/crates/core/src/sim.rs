//! Time-stepped simulation, dual-track anomaly evaluation and labeling.
//!
//! Two tracks evolve in lockstep. The clean track always evaluates the
//! nominal equations on clean values. The contaminated track evaluates the
//! mutated equation inside an anomaly window, and every lagged read of a
//! parent goes to the contaminated value only if the edge propagates (a
//! variable always reads its own contaminated past). Labels are derived from
//! the same data-flow rules, so a label-0 cell is bit-identical on both
//! tracks.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::anomaly::{
    assign_propagation, contaminate, plan_anomalies, AnomalyError, AnomalySpec,
    AnomalyWindow, MutationStrategy, EFFECT_THRESHOLD,
};
use crate::expr::{Expr, History, InvalidExpr, CLAMP_BOUND, GUARD_EPSILON};
use crate::funcgen::{generate_function, FuncGenError, FunctionParams};
use crate::graph::{generate_graph, DependencyGraph, GraphError};
use crate::matrix::{Label, LabelMatrix, SeriesMatrix};
use crate::params::{GenerationParams, ParamError};
use crate::rng::{substream, Stream};

/// Engine constants recorded with every run.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct EngineConstants {
    pub clamp_bound: f64,
    pub guard_epsilon: f64,
}

pub const ENGINE_CONSTANTS: EngineConstants = EngineConstants {
    clamp_bound: CLAMP_BOUND,
    guard_epsilon: GUARD_EPSILON,
};

/// Warm-up rows evaluated before `t = 0` and discarded: the largest lag read
/// by any nominal equation.
pub fn warmup_for(equations: &[Expr]) -> usize {
    equations.iter().map(Expr::max_lag).max().unwrap_or(0)
}

/// Past rows of one track, `warmup` rows of which precede `t = 0`.
struct Past<'a> {
    data: &'a [f64],
    d: usize,
    warmup: usize,
}

impl History for Past<'_> {
    #[inline]
    fn value(&self, var: usize, t: i64) -> f64 {
        let row = t + self.warmup as i64;
        if row < 0 {
            0.0
        } else {
            self.data[row as usize * self.d + var]
        }
    }
}

/// Contaminated-track view for one target variable: per source variable,
/// whether reads go to the contaminated past.
struct Mixed<'a> {
    clean: &'a [f64],
    contaminated: &'a [f64],
    from_contaminated: &'a [bool],
    d: usize,
    warmup: usize,
}

impl History for Mixed<'_> {
    #[inline]
    fn value(&self, var: usize, t: i64) -> f64 {
        let row = t + self.warmup as i64;
        if row < 0 {
            return 0.0;
        }
        let buf = if self.from_contaminated[var] {
            self.contaminated
        } else {
            self.clean
        };
        buf[row as usize * self.d + var]
    }
}

/// Clean values for rows `-warmup .. len`, warm-up rows included.
fn clean_pass(equations: &[Expr], len: usize, warmup: usize) -> Vec<f64> {
    let d = equations.len();
    let rows = warmup + len;
    let mut data = vec![0.0; rows * d];
    for r in 0..rows {
        let t = r as i64 - warmup as i64;
        let (past, current) = data.split_at_mut(r * d);
        let h = Past { data: past, d, warmup };
        for (j, eq) in equations.iter().enumerate() {
            current[j] = eq.eval_at(t, &h);
        }
    }
    data
}

/// Per target `j`, per source `p`: does `j` read `p` from the contaminated
/// track? Row-major `d × d`.
fn read_routes(graph: &DependencyGraph) -> Vec<bool> {
    let d = graph.d();
    let mut routes = vec![false; d * d];
    for j in 0..d {
        routes[j * d + j] = true;
    }
    for e in graph.edges() {
        if e.propagates {
            routes[e.dst * d + e.src] = true;
        }
    }
    routes
}

fn contaminated_pass(
    equations: &[Expr],
    graph: &DependencyGraph,
    anomalies: &[AnomalySpec],
    clean: &[f64],
    test_start: usize,
    warmup: usize,
) -> Vec<f64> {
    let d = equations.len();
    let rows = clean.len() / d.max(1);
    let routes = read_routes(graph);
    let mut data = clean.to_vec();
    let mut active: Vec<Option<&Expr>> = vec![None; d];
    for r in (warmup + test_start)..rows {
        let t = r - warmup;
        active.iter_mut().for_each(|a| *a = None);
        for a in anomalies {
            if a.window.contains(t) {
                active[a.window.var] = Some(&a.mutated);
            }
        }
        let (past, current) = data.split_at_mut(r * d);
        for j in 0..d {
            let h = Mixed {
                clean,
                contaminated: past,
                from_contaminated: &routes[j * d..(j + 1) * d],
                d,
                warmup,
            };
            let eq = active[j].unwrap_or(&equations[j]);
            current[j] = eq.eval_at(t as i64, &h);
        }
    }
    data
}

fn delivered(data: &[f64], d: usize, warmup: usize, from: usize, to: usize) -> SeriesMatrix {
    let rows = to - from;
    let start = (warmup + from) * d;
    SeriesMatrix::from_vec(rows, d, data[start..start + rows * d].to_vec())
}

/// Clean values of a system of equations for `t = 0 .. len`.
pub fn compute_values(equations: &[Expr], len: usize, warmup: usize) -> SeriesMatrix {
    let d = equations.len();
    delivered(&clean_pass(equations, len, warmup), d, warmup, 0, len)
}

/// Both tracks over `t = 0 .. len`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tracks {
    pub clean: SeriesMatrix,
    pub contaminated: SeriesMatrix,
}

/// Evaluates clean and contaminated tracks. Anomalies must lie in
/// `[test_start, len)`; before `test_start` both tracks coincide.
pub fn compute_anomalies(
    equations: &[Expr],
    graph: &DependencyGraph,
    anomalies: &[AnomalySpec],
    len: usize,
    test_start: usize,
    warmup: usize,
) -> Tracks {
    let d = equations.len();
    let clean = clean_pass(equations, len, warmup);
    let contaminated = contaminated_pass(equations, graph, anomalies, &clean, test_start, warmup);
    Tracks {
        clean: delivered(&clean, d, warmup, 0, len),
        contaminated: delivered(&contaminated, d, warmup, 0, len),
    }
}

/// Rich labels of the test segment `[test_start, len)`.
///
/// A cell is 1 inside an anomaly window of its variable. Otherwise it looks
/// at every `(parent, lag)` its nominal equation reads: a parent labeled 1 or
/// 3 at `t - lag` gives 3 through a propagating edge (or a self-reference)
/// and 2 through a non-propagating one. Precedence is 1 > 3 > 2 > 0.
pub fn compute_labels(
    equations: &[Expr],
    graph: &DependencyGraph,
    anomalies: &[AnomalySpec],
    test_start: usize,
    len: usize,
) -> LabelMatrix {
    let d = equations.len();
    let rows = len.saturating_sub(test_start);
    let mut labels = LabelMatrix::normal(rows, d);
    let reads: Vec<Vec<(usize, usize, bool)>> = equations
        .iter()
        .enumerate()
        .map(|(j, eq)| {
            eq.read_set()
                .into_iter()
                .map(|(p, lag)| {
                    let propagates = p == j || graph.edge(p, j).is_some_and(|e| e.propagates);
                    (p, lag, propagates)
                })
                .collect()
        })
        .collect();
    for r in 0..rows {
        let t = test_start + r;
        for j in 0..d {
            if anomalies.iter().any(|a| a.window.var == j && a.window.contains(t)) {
                labels.set(r, j, Label::Anomalous);
                continue;
            }
            let mut label = Label::Normal;
            for &(p, lag, propagates) in &reads[j] {
                if lag > r {
                    continue;
                }
                if labels.get(r - lag, p).is_abnormal() {
                    if propagates {
                        label = Label::ParentPropagated;
                        break;
                    }
                    label = Label::ParentNotPropagated;
                }
            }
            labels.set(r, j, label);
        }
    }
    labels
}

fn column_std(m: &SeriesMatrix, col: usize) -> f64 {
    let n = m.rows();
    if n == 0 {
        return 0.0;
    }
    let mean = m.column(col).sum::<f64>() / n as f64;
    let var = m.column(col).map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    libm::sqrt(var)
}

/// Adds zero-mean Gaussian noise with standard deviation
/// `sigma × std(train column)` to both segments. Columns with zero train
/// spread and `sigma = 0` are left untouched.
pub fn add_noise<R: Rng + ?Sized>(
    train: &mut SeriesMatrix,
    test: &mut SeriesMatrix,
    sigma: f64,
    rng: &mut R,
) {
    if sigma == 0.0 {
        return;
    }
    let scales: Vec<f64> = (0..train.cols()).map(|j| sigma * column_std(train, j)).collect();
    for m in [train, test] {
        for r in 0..m.rows() {
            for (j, &s) in scales.iter().enumerate() {
                if s > 0.0 {
                    let z: f64 = StandardNormal.sample(rng);
                    let v = (m.get(r, j) + s * z).clamp(-CLAMP_BOUND, CLAMP_BOUND);
                    m.set(r, j, v);
                }
            }
        }
    }
}

/// How a result was produced.
#[derive(Clone, Debug, PartialEq)]
pub enum Recipe {
    Automatic(GenerationParams),
    Manual { propagation_prob: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenerationResult {
    /// Delivered train segment, `t = 0 .. train_length`.
    pub train: SeriesMatrix,
    /// Delivered test segment (contaminated track, plus noise if enabled).
    pub test: SeriesMatrix,
    /// Noise-free clean track over the test segment.
    pub clean_test: SeriesMatrix,
    /// Noise-free contaminated track over the test segment.
    pub contaminated_test: SeriesMatrix,
    /// Rich labels of the test segment.
    pub labels: LabelMatrix,
    /// Graph with propagation flags.
    pub graph: DependencyGraph,
    pub equations: Vec<Expr>,
    pub anomalies: Vec<AnomalySpec>,
    pub train_length: usize,
    pub test_length: usize,
    pub warmup: usize,
    pub noise_sigma: f64,
    pub seed: u64,
    pub recipe: Recipe,
}

impl GenerationResult {
    pub fn d(&self) -> usize {
        self.equations.len()
    }

    pub fn binary_labels(&self) -> Vec<u8> {
        self.labels.binary()
    }

    pub fn constants(&self) -> EngineConstants {
        ENGINE_CONSTANTS
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum GenerationError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("function generation for x{var} failed: {source}")]
    Function { var: usize, source: FuncGenError },
    #[error(transparent)]
    Anomaly(#[from] AnomalyError),
    #[error(transparent)]
    Manual(#[from] ManualError),
}

/// Samples everything that precedes simulation: graph (with propagation
/// flags), nominal equations and anomaly windows.
pub fn plan_run(
    params: &GenerationParams,
) -> Result<(DependencyGraph, Vec<Expr>, Vec<AnomalyWindow>), GenerationError> {
    params.validate()?;
    let seed = params.seed;
    let mut graph = generate_graph(params, &mut substream(seed, Stream::Graph))?;
    let fp = FunctionParams::from(params);
    let equations = (0..params.d)
        .map(|v| {
            generate_function(&graph.parents(v), &fp, &mut substream(seed, Stream::Function(v)))
                .map_err(|source| GenerationError::Function { var: v, source })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let windows = plan_anomalies(params, &mut substream(seed, Stream::Plan))?;
    assign_propagation(
        &graph,
        params.propagation_prob,
        &mut substream(seed, Stream::Propagation),
    )
    .apply(&mut graph);
    Ok((graph, equations, windows))
}

fn differs_somewhere(
    window: &AnomalyWindow,
    clean: &[f64],
    contaminated: &[f64],
    d: usize,
    warmup: usize,
) -> bool {
    (window.t_start..window.t_end).any(|t| {
        let i = (t + warmup) * d + window.var;
        libm::fabs(clean[i] - contaminated[i]) > EFFECT_THRESHOLD
    })
}

/// Runs a full automatic generation.
pub fn generate_dataset(params: &GenerationParams) -> Result<GenerationResult, GenerationError> {
    let (graph, equations, windows) = plan_run(params)?;
    let seed = params.seed;
    let d = params.d;
    let len = params.train_length + params.test_length;
    let warmup = warmup_for(&equations);
    let clean = clean_pass(&equations, len, warmup);
    let fp = FunctionParams::from(params);

    let mut anomalies: Vec<AnomalySpec> = windows
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let f = &equations[w.var];
            let h = Past {
                data: &clean,
                d,
                warmup,
            };
            let effective = |g: &Expr| {
                (w.t_start..w.t_end).any(|t| {
                    let t = t as i64;
                    libm::fabs(g.eval_at(t, &h) - f.eval_at(t, &h)) > EFFECT_THRESHOLD
                })
            };
            let c = contaminate(
                f,
                &graph.parents(w.var),
                &fp,
                &mut substream(seed, Stream::Mutation(i)),
                effective,
            );
            AnomalySpec {
                window: *w,
                strategy: c.strategy,
                mutated: c.mutated,
            }
        })
        .collect();

    // The screen above used clean inputs; confirm on the real tracks and pin
    // any window that still shows no deviation to a constant away from the
    // clean value at its first step.
    let mut contaminated;
    loop {
        contaminated = contaminated_pass(&equations, &graph, &anomalies, &clean, params.train_length, warmup);
        let mut changed = false;
        for a in &mut anomalies {
            if !differs_somewhere(&a.window, &clean, &contaminated, d, warmup) {
                let v = clean[(a.window.t_start + warmup) * d + a.window.var];
                let k = if v >= 0.0 { v - 5.0 } else { v + 5.0 };
                a.mutated = Expr::Const(k);
                a.strategy = MutationStrategy::ConstantValue;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    Ok(assemble(
        equations,
        graph,
        anomalies,
        &clean,
        &contaminated,
        Layout {
            train_length: params.train_length,
            test_length: params.test_length,
            warmup,
        },
        params.noise_sigma,
        seed,
        Recipe::Automatic(params.clone()),
    ))
}

#[derive(Copy, Clone)]
struct Layout {
    train_length: usize,
    test_length: usize,
    warmup: usize,
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    equations: Vec<Expr>,
    graph: DependencyGraph,
    anomalies: Vec<AnomalySpec>,
    clean: &[f64],
    contaminated: &[f64],
    layout: Layout,
    noise_sigma: f64,
    seed: u64,
    recipe: Recipe,
) -> GenerationResult {
    let d = equations.len();
    let Layout {
        train_length,
        test_length,
        warmup,
    } = layout;
    let len = train_length + test_length;
    let labels = compute_labels(&equations, &graph, &anomalies, train_length, len);
    let clean_test = delivered(clean, d, warmup, train_length, len);
    let contaminated_test = delivered(contaminated, d, warmup, train_length, len);
    let mut train = delivered(clean, d, warmup, 0, train_length);
    let mut test = contaminated_test.clone();
    add_noise(
        &mut train,
        &mut test,
        noise_sigma,
        &mut substream(seed, Stream::Noise),
    );
    GenerationResult {
        train,
        test,
        clean_test,
        contaminated_test,
        labels,
        graph,
        equations,
        anomalies,
        train_length,
        test_length,
        warmup,
        noise_sigma,
        seed,
        recipe,
    }
}

/// A user-supplied anomaly: `equation` replaces the nominal one on
/// `[t_start, t_end)` (global timesteps).
#[derive(Clone, Debug, PartialEq)]
pub struct ManualAnomaly {
    pub var: usize,
    pub t_start: usize,
    pub t_end: usize,
    pub equation: Expr,
}

/// A fully specified system of equations.
#[derive(Clone, Debug, PartialEq)]
pub struct ManualSystem {
    pub equations: Vec<Expr>,
    pub anomalies: Vec<ManualAnomaly>,
    pub train_length: usize,
    pub test_length: usize,
    /// Probability for edges without an explicit override.
    pub propagation_prob: f64,
    /// Explicit `(src, dst, propagates)` flags.
    pub propagation: Vec<(usize, usize, bool)>,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for ManualSystem {
    fn default() -> Self {
        ManualSystem {
            equations: Vec::new(),
            anomalies: Vec::new(),
            train_length: 0,
            test_length: 0,
            propagation_prob: 0.5,
            propagation: Vec::new(),
            noise_sigma: 0.0,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ManualError {
    #[error("at least one equation is required")]
    Empty,
    #[error("equation of x{var}: {source}")]
    Equation { var: usize, source: InvalidExpr },
    #[error("anomaly {index}: {source}")]
    AnomalyEquation { index: usize, source: InvalidExpr },
    #[error("anomaly {index}: variable x{var} does not exist")]
    UnknownVariable { index: usize, var: usize },
    #[error("anomaly {index}: window [{t_start}, {t_end}) is not a nonempty range inside the test segment [{test_start}, {end})")]
    WindowOutsideTest {
        index: usize,
        t_start: usize,
        t_end: usize,
        test_start: usize,
        end: usize,
    },
    #[error("anomalies {first} and {second} overlap on x{var}")]
    OverlappingWindows { first: usize, second: usize, var: usize },
    #[error("propagation override for {src}->{dst} does not match an edge")]
    UnknownEdge { src: usize, dst: usize },
    #[error("self-loop {var}->{var} always propagates")]
    SelfLoopOverride { var: usize },
    #[error("{0}")]
    Param(ParamError),
}

impl ManualSystem {
    pub fn d(&self) -> usize {
        self.equations.len()
    }

    /// Checks equations, windows and overrides; returns the implied graph
    /// with propagation flags resolved.
    pub fn resolve_graph(&self) -> Result<DependencyGraph, ManualError> {
        let d = self.d();
        if d == 0 {
            return Err(ManualError::Empty);
        }
        for (var, eq) in self.equations.iter().enumerate() {
            eq.validate(d)
                .map_err(|source| ManualError::Equation { var, source })?;
        }
        if !(0.0..=1.0).contains(&self.propagation_prob) {
            return Err(ManualError::Param(ParamError::new(
                "propagation_prob",
                "must be in [0, 1]",
            )));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(ManualError::Param(ParamError::new(
                "noise_sigma",
                "must be a finite value >= 0",
            )));
        }
        let test_start = self.train_length;
        let end = self.train_length + self.test_length;
        for (index, a) in self.anomalies.iter().enumerate() {
            if a.var >= d {
                return Err(ManualError::UnknownVariable { index, var: a.var });
            }
            if a.t_start >= a.t_end || a.t_start < test_start || a.t_end > end {
                return Err(ManualError::WindowOutsideTest {
                    index,
                    t_start: a.t_start,
                    t_end: a.t_end,
                    test_start,
                    end,
                });
            }
            a.equation
                .validate(d)
                .map_err(|source| ManualError::AnomalyEquation { index, source })?;
            for (first, b) in self.anomalies[..index].iter().enumerate() {
                if b.var == a.var && b.t_start < a.t_end && a.t_start < b.t_end {
                    return Err(ManualError::OverlappingWindows {
                        first,
                        second: index,
                        var: a.var,
                    });
                }
            }
        }

        let mut graph = DependencyGraph::from_equations(&self.equations);
        assign_propagation(
            &graph,
            self.propagation_prob,
            &mut substream(self.seed, Stream::Propagation),
        )
        .apply(&mut graph);
        for &(src, dst, propagates) in &self.propagation {
            if src == dst && !propagates {
                return Err(ManualError::SelfLoopOverride { var: src });
            }
            let edge = graph
                .edges_mut()
                .iter_mut()
                .find(|e| e.src == src && e.dst == dst)
                .ok_or(ManualError::UnknownEdge { src, dst })?;
            edge.propagates = propagates;
        }
        Ok(graph)
    }
}

/// Runs a system given by explicit equations and anomalies.
pub fn generate_manual(system: &ManualSystem) -> Result<GenerationResult, GenerationError> {
    let graph = system.resolve_graph()?;
    let equations = system.equations.clone();
    let anomalies: Vec<AnomalySpec> = system
        .anomalies
        .iter()
        .map(|a| AnomalySpec {
            window: AnomalyWindow {
                var: a.var,
                t_start: a.t_start,
                t_end: a.t_end,
            },
            strategy: MutationStrategy::Manual,
            mutated: a.equation.clone(),
        })
        .collect();
    let len = system.train_length + system.test_length;
    let warmup = warmup_for(&equations);
    let clean = clean_pass(&equations, len, warmup);
    let contaminated =
        contaminated_pass(&equations, &graph, &anomalies, &clean, system.train_length, warmup);
    Ok(assemble(
        equations,
        graph,
        anomalies,
        &clean,
        &contaminated,
        Layout {
            train_length: system.train_length,
            test_length: system.test_length,
            warmup,
        },
        system.noise_sigma,
        system.seed,
        Recipe::Manual {
            propagation_prob: system.propagation_prob,
        },
    ))
}

/// Feasibility of an automatic configuration without simulating it.
pub fn dry_run(params: &GenerationParams) -> Result<(DependencyGraph, Vec<AnomalyWindow>), GenerationError> {
    let (graph, _, windows) = plan_run(params)?;
    Ok((graph, windows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;

    fn eqs(src: &[&str]) -> Vec<Expr> {
        src.iter()
            .map(|s| parse_expression(s, src.len()).unwrap())
            .collect()
    }

    #[test]
    fn lagged_chain_without_warmup() {
        let e = eqs(&["sin(t)", "2*x0[t-1]"]);
        let m = compute_values(&e, 50, 0);
        assert_eq!(m.get(0, 1), 0.0);
        for t in 1..50 {
            assert!((m.get(t, 1) - 2.0 * ((t - 1) as f64).sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn lagged_chain_with_warmup() {
        let e = eqs(&["sin(t)", "2*x0[t-1]"]);
        assert_eq!(warmup_for(&e), 1);
        let m = compute_values(&e, 50, 1);
        for t in 0..50 {
            assert!((m.get(t, 1) - 2.0 * (t as f64 - 1.0).sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_column() {
        let m = compute_values(&eqs(&["3.25"]), 10, 0);
        assert!(m.column(0).all(|v| v == 3.25));
    }

    fn chain(propagates: bool) -> (Vec<Expr>, DependencyGraph, Vec<AnomalySpec>) {
        let e = eqs(&["sin(t)", "x0[t-1] + 1"]);
        let mut g = DependencyGraph::from_equations(&e);
        g.edges_mut()[0].propagates = propagates;
        let a = vec![AnomalySpec {
            window: AnomalyWindow {
                var: 0,
                t_start: 10,
                t_end: 15,
            },
            strategy: MutationStrategy::Manual,
            mutated: parse_expression("cos(t)", 2).unwrap(),
        }];
        (e, g, a)
    }

    #[test]
    fn no_anomalies_means_identical_tracks() {
        let (e, g, _) = chain(true);
        let tr = compute_anomalies(&e, &g, &[], 20, 5, 1);
        assert_eq!(tr.clean, tr.contaminated);
        let l = compute_labels(&e, &g, &[], 5, 20);
        assert_eq!(l.count(Label::Normal), 30);
    }

    #[test]
    fn non_propagating_edge_shields_child() {
        let (e, g, a) = chain(false);
        let tr = compute_anomalies(&e, &g, &a, 20, 5, 1);
        for t in 0..20 {
            assert_eq!(tr.clean.get(t, 1), tr.contaminated.get(t, 1));
        }
        assert!((10..15).all(|t| tr.contaminated.get(t, 0) == (t as f64).cos()));
        let l = compute_labels(&e, &g, &a, 5, 20);
        for t in 5..20 {
            let want = if (11..16).contains(&t) {
                Label::ParentNotPropagated
            } else {
                Label::Normal
            };
            assert_eq!(l.get(t - 5, 1), want, "t = {t}");
        }
    }

    #[test]
    fn propagating_edge_corrupts_child_one_step_later() {
        let (e, g, a) = chain(true);
        let tr = compute_anomalies(&e, &g, &a, 20, 5, 1);
        for t in 0..20 {
            let prev = t as f64 - 1.0;
            let expected = if (11..16).contains(&t) {
                libm::cos(prev) + 1.0
            } else {
                libm::sin(prev) + 1.0
            };
            assert_eq!(tr.contaminated.get(t, 1), expected, "t = {t}");
        }
        let l = compute_labels(&e, &g, &a, 5, 20);
        for t in 5..20 {
            let want0 = if (10..15).contains(&t) {
                Label::Anomalous
            } else {
                Label::Normal
            };
            let want1 = if (11..16).contains(&t) {
                Label::ParentPropagated
            } else {
                Label::Normal
            };
            assert_eq!(l.get(t - 5, 0), want0, "t = {t}");
            assert_eq!(l.get(t - 5, 1), want1, "t = {t}");
        }
    }

    #[test]
    fn zero_noise_is_identity_and_zero_spread_untouched() {
        let mut train = SeriesMatrix::from_vec(3, 2, vec![0.0, 1.0, 0.0, 2.0, 0.0, 3.0]);
        let mut test = train.clone();
        let (a, b) = (train.clone(), test.clone());
        add_noise(&mut train, &mut test, 0.0, &mut substream(1, Stream::Noise));
        assert_eq!((&train, &test), (&a, &b));
        add_noise(&mut train, &mut test, 0.1, &mut substream(1, Stream::Noise));
        assert!(train.column(0).all(|v| v == 0.0));
        assert!(test.column(0).all(|v| v == 0.0));
        assert_ne!(train, a);
    }

    #[test]
    fn manual_rejects_bad_windows() {
        let base = ManualSystem {
            equations: eqs(&["sin(t)", "x0[t-1]"]),
            train_length: 10,
            test_length: 10,
            ..Default::default()
        };
        let with = |var, t_start, t_end| ManualSystem {
            anomalies: vec![ManualAnomaly {
                var,
                t_start,
                t_end,
                equation: Expr::Const(1.0),
            }],
            ..base.clone()
        };
        assert!(matches!(
            with(0, 5, 12).resolve_graph(),
            Err(ManualError::WindowOutsideTest { .. })
        ));
        assert!(matches!(
            with(2, 12, 14).resolve_graph(),
            Err(ManualError::UnknownVariable { .. })
        ));
        assert!(with(1, 12, 20).resolve_graph().is_ok());
        let overlap = ManualSystem {
            anomalies: vec![
                ManualAnomaly { var: 0, t_start: 11, t_end: 15, equation: Expr::Const(1.0) },
                ManualAnomaly { var: 0, t_start: 14, t_end: 16, equation: Expr::Const(2.0) },
            ],
            ..base.clone()
        };
        assert!(matches!(
            overlap.resolve_graph(),
            Err(ManualError::OverlappingWindows { first: 0, second: 1, var: 0 })
        ));
        let bad_edge = ManualSystem {
            propagation: vec![(1, 0, true)],
            ..base
        };
        assert!(matches!(
            bad_edge.resolve_graph(),
            Err(ManualError::UnknownEdge { src: 1, dst: 0 })
        ));
    }
}
