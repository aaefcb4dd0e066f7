//! Anomaly planning and equation mutation.
//!
//! A budget of `round(ratio × test_length)` anomalous points is cut into
//! windows at sorted random cut points; each window lands on a random
//! variable at a random offset in the test segment. The variable's equation
//! is replaced on the window by a mutated copy produced by inserting a
//! subtree, deleting one, or swapping an operator.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::{index, IndexedRandom};
use rand::Rng;

use crate::expr::{BinaryOp, Expr, UnaryOp};
use crate::funcgen::{random_constant, random_subtree, FunctionParams};
use crate::graph::DependencyGraph;
use crate::params::GenerationParams;

/// Mean window length used when the number of anomalies is not given.
pub const DEFAULT_MEAN_WINDOW: usize = 50;
/// Placement attempts per window before giving up.
pub const PLACEMENT_RETRIES: usize = 50;
/// Mutation attempts before the constant-offset fallback.
pub const MUTATION_ATTEMPTS: usize = 20;
/// Minimum deviation for a mutation to count as effective.
pub const EFFECT_THRESHOLD: f64 = 1e-6;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum MutationStrategy {
    InsertSubtree,
    DeleteSubtree,
    ReplaceOperator,
    /// Fallback: the original equation plus a constant offset.
    ConstantOffset,
    /// Last resort: a constant chosen away from the clean value.
    ConstantValue,
    /// Equation supplied by the user.
    Manual,
}

impl MutationStrategy {
    /// The three tree mutations drawn uniformly.
    pub const TREE: [MutationStrategy; 3] = [
        MutationStrategy::InsertSubtree,
        MutationStrategy::DeleteSubtree,
        MutationStrategy::ReplaceOperator,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MutationStrategy::InsertSubtree => "insert_subtree",
            MutationStrategy::DeleteSubtree => "delete_subtree",
            MutationStrategy::ReplaceOperator => "replace_operator",
            MutationStrategy::ConstantOffset => "constant_offset",
            MutationStrategy::ConstantValue => "constant_value",
            MutationStrategy::Manual => "manual",
        }
    }
}

impl fmt::Display for MutationStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MutationStrategy {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        [
            MutationStrategy::InsertSubtree,
            MutationStrategy::DeleteSubtree,
            MutationStrategy::ReplaceOperator,
            MutationStrategy::ConstantOffset,
            MutationStrategy::ConstantValue,
            MutationStrategy::Manual,
        ]
        .into_iter()
        .find(|m| m.as_str() == s)
        .ok_or(())
    }
}

/// Half-open window `[t_start, t_end)` on one variable, in global timesteps.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct AnomalyWindow {
    pub var: usize,
    pub t_start: usize,
    pub t_end: usize,
}

impl AnomalyWindow {
    pub fn len(&self) -> usize {
        self.t_end - self.t_start
    }

    pub fn is_empty(&self) -> bool {
        self.t_end <= self.t_start
    }

    pub fn contains(&self, t: usize) -> bool {
        (self.t_start..self.t_end).contains(&t)
    }

    pub fn overlaps(&self, other: &AnomalyWindow) -> bool {
        self.var == other.var && self.t_start < other.t_end && other.t_start < self.t_end
    }
}

/// One injected anomaly: the variable's equation is `mutated` on the window.
#[derive(Clone, Debug, PartialEq)]
pub struct AnomalySpec {
    pub window: AnomalyWindow,
    pub strategy: MutationStrategy,
    pub mutated: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum AnomalyError {
    #[error("could not place an anomaly of length {length} without overlapping after {retries} attempts")]
    SchedulingFailed { length: usize, retries: usize },
    #[error("tree has no node eligible for deletion")]
    NoCandidate,
}

/// Window lengths summing to `budget`, cut at `count - 1` distinct sorted
/// points of `1..budget`.
pub fn window_lengths<R: Rng + ?Sized>(budget: usize, count: usize, rng: &mut R) -> Vec<usize> {
    if budget == 0 || count == 0 {
        return Vec::new();
    }
    let count = count.min(budget);
    let mut cuts: Vec<usize> = index::sample(rng, budget - 1, count - 1)
        .into_iter()
        .map(|c| c + 1)
        .collect();
    cuts.sort_unstable();
    cuts.push(budget);
    let mut prev = 0;
    cuts.into_iter()
        .map(|c| {
            let len = c - prev;
            prev = c;
            len
        })
        .collect()
}

/// Places the anomaly windows of a run inside the test segment
/// `[train_length, train_length + test_length)`.
pub fn plan_anomalies<R: Rng + ?Sized>(
    params: &GenerationParams,
    rng: &mut R,
) -> Result<Vec<AnomalyWindow>, AnomalyError> {
    let budget = params.anomalous_points().min(params.test_length);
    let count = params
        .num_anomalies
        .unwrap_or((budget / DEFAULT_MEAN_WINDOW).max(1));
    let mut placed: Vec<AnomalyWindow> = Vec::new();
    for length in window_lengths(budget, count, rng) {
        let mut ok = false;
        for _ in 0..PLACEMENT_RETRIES {
            let offset = rng.random_range(0..=params.test_length - length);
            let w = AnomalyWindow {
                var: rng.random_range(0..params.d),
                t_start: params.train_length + offset,
                t_end: params.train_length + offset + length,
            };
            if !placed.iter().any(|p| p.overlaps(&w)) {
                placed.push(w);
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(AnomalyError::SchedulingFailed {
                length,
                retries: PLACEMENT_RETRIES,
            });
        }
    }
    Ok(placed)
}

/// Per-edge propagation flags, aligned with `graph.edges()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropagationMap(pub Vec<bool>);

impl PropagationMap {
    pub fn apply(&self, graph: &mut DependencyGraph) {
        for (e, &p) in graph.edges_mut().iter_mut().zip(&self.0) {
            e.propagates = p;
        }
    }
}

/// Draws one propagation flag per edge with probability `prob`. Self-loops
/// always propagate: a variable's own corruption feeds its later values.
pub fn assign_propagation<R: Rng + ?Sized>(
    graph: &DependencyGraph,
    prob: f64,
    rng: &mut R,
) -> PropagationMap {
    PropagationMap(
        graph
            .edges()
            .iter()
            .map(|e| rng.random_bool(prob.clamp(0.0, 1.0)) || e.is_self_loop())
            .collect(),
    )
}

/// Picks a non-root node whose depth lies within one level of the median
/// depth of all non-root nodes. Returns its preorder index.
pub fn select_deletion_node<R: Rng + ?Sized>(f: &Expr, rng: &mut R) -> Result<usize, AnomalyError> {
    let depths = f.node_depths();
    if depths.len() < 2 {
        return Err(AnomalyError::NoCandidate);
    }
    let mut sorted = depths[1..].to_vec();
    sorted.sort_unstable();
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2] as f64
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) as f64 / 2.0
    };
    let candidates: Vec<usize> = (1..depths.len())
        .filter(|&i| libm::fabs(depths[i] as f64 - median) <= 1.0)
        .collect();
    candidates.choose(rng).copied().ok_or(AnomalyError::NoCandidate)
}

/// Result of [`contaminate`].
#[derive(Clone, Debug, PartialEq)]
pub struct Contamination {
    pub mutated: Expr,
    /// Strategy that produced `mutated`.
    pub strategy: MutationStrategy,
    /// The first uniform strategy draw, before any retry or fallback.
    pub initial_strategy: MutationStrategy,
}

fn insert_subtree<R: Rng + ?Sized>(f: &Expr, parents: &[usize], params: &FunctionParams, rng: &mut R) -> Expr {
    let mut g = f.clone();
    let at = rng.random_range(0..g.size());
    let sub = random_subtree(parents, params, rng);
    let op = *BinaryOp::ALL.choose(rng).unwrap();
    let node = g.node_mut(at).expect("index within tree");
    let old = core::mem::replace(node, Expr::Const(0.0));
    *node = Expr::binary(op, old, sub);
    g
}

fn delete_subtree<R: Rng + ?Sized>(f: &Expr, rng: &mut R) -> Option<Expr> {
    let at = select_deletion_node(f, rng).ok()?;
    let mut g = f.clone();
    *g.node_mut(at).expect("index within tree") = Expr::Const(random_constant(rng));
    Some(g)
}

fn replace_operator<R: Rng + ?Sized>(f: &Expr, rng: &mut R) -> Option<Expr> {
    let ops: Vec<usize> = (0..f.size())
        .filter(|&i| f.node(i).and_then(Expr::operator).is_some())
        .collect();
    let &at = ops.choose(rng)?;
    let mut g = f.clone();
    match g.node_mut(at).expect("index within tree") {
        Expr::Unary(op, _) => {
            let current = *op;
            let choices: Vec<UnaryOp> = UnaryOp::ALL.into_iter().filter(|o| *o != current).collect();
            *op = *choices.choose(rng).unwrap();
        }
        Expr::Binary(op, _, _) => {
            let current = *op;
            let choices: Vec<BinaryOp> = BinaryOp::ALL.into_iter().filter(|o| *o != current).collect();
            *op = *choices.choose(rng).unwrap();
        }
        _ => unreachable!("operator node"),
    }
    Some(g)
}

/// Applies `strategy`, falling back to insertion when the tree offers no
/// node for it.
pub fn mutate<R: Rng + ?Sized>(
    f: &Expr,
    strategy: MutationStrategy,
    parents: &[usize],
    params: &FunctionParams,
    rng: &mut R,
) -> (Expr, MutationStrategy) {
    let attempt = match strategy {
        MutationStrategy::DeleteSubtree => delete_subtree(f, rng),
        MutationStrategy::ReplaceOperator => replace_operator(f, rng),
        _ => None,
    };
    match attempt {
        Some(g) => (g, strategy),
        None => (
            insert_subtree(f, parents, params, rng),
            MutationStrategy::InsertSubtree,
        ),
    }
}

/// Produces a mutated copy of `f` accepted by `is_effective`. After
/// [`MUTATION_ATTEMPTS`] rejected mutations the result is `f` plus a constant
/// offset of magnitude in `[2, 5]`.
pub fn contaminate<R, F>(
    f: &Expr,
    parents: &[usize],
    params: &FunctionParams,
    rng: &mut R,
    mut is_effective: F,
) -> Contamination
where
    R: Rng + ?Sized,
    F: FnMut(&Expr) -> bool,
{
    let mut initial = None;
    for _ in 0..MUTATION_ATTEMPTS {
        let strategy = *MutationStrategy::TREE.choose(rng).unwrap();
        initial.get_or_insert(strategy);
        let (g, used) = mutate(f, strategy, parents, params, rng);
        if g != *f && is_effective(&g) {
            return Contamination {
                mutated: g,
                strategy: used,
                initial_strategy: initial.unwrap(),
            };
        }
    }
    let magnitude = libm::round(rng.random_range(2.0..=5.0) * 100.0) / 100.0;
    let offset = if rng.random_bool(0.5) { magnitude } else { -magnitude };
    Contamination {
        mutated: Expr::binary(BinaryOp::Add, f.clone(), Expr::Const(offset)),
        strategy: MutationStrategy::ConstantOffset,
        initial_strategy: initial.unwrap_or(MutationStrategy::InsertSubtree),
    }
}

/// True when every operator node has its declared number of children.
/// Holds by construction for [`Expr`]; kept as an explicit check for tests
/// and for trees assembled by hand.
pub fn is_arity_valid(e: &Expr) -> bool {
    let mut ok = true;
    e.visit(&mut |n| {
        if let Some(op) = n.operator() {
            let children = match n {
                Expr::Unary(..) => 1,
                Expr::Binary(..) => 2,
                _ => 0,
            };
            ok &= op.arity() == children;
        }
    });
    ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;
    use crate::rng::{substream, Stream};

    fn rng(seed: u64) -> crate::rng::StreamRng {
        substream(seed, Stream::Plan)
    }

    fn plan(ratio: f64, test_length: usize, seed: u64) -> Result<Vec<AnomalyWindow>, AnomalyError> {
        let p = GenerationParams {
            d: 5,
            train_length: 300,
            test_length,
            contamination_ratio: ratio,
            ..Default::default()
        };
        plan_anomalies(&p, &mut rng(seed))
    }

    #[test]
    fn zero_ratio_plans_nothing() {
        assert!(plan(0.0, 2000, 1).unwrap().is_empty());
    }

    #[test]
    fn budget_is_exact_and_windows_disjoint() {
        for seed in 0..200 {
            let ws = plan(0.05, 2000, seed).unwrap();
            assert_eq!(ws.len(), 2);
            assert_eq!(ws.iter().map(AnomalyWindow::len).sum::<usize>(), 100);
            for (i, a) in ws.iter().enumerate() {
                assert!(a.t_start >= 300 && a.t_end <= 2300 && !a.is_empty());
                assert!(ws[i + 1..].iter().all(|b| !a.overlaps(b)));
            }
        }
    }

    #[test]
    fn dense_plans_fail_to_schedule() {
        let p = GenerationParams {
            d: 1,
            train_length: 0,
            test_length: 100,
            contamination_ratio: 0.9,
            num_anomalies: Some(45),
            ..Default::default()
        };
        let failures = (0..20)
            .filter(|&s| plan_anomalies(&p, &mut rng(s)).is_err())
            .count();
        assert!(failures > 0);
    }

    #[test]
    fn lengths_partition_budget() {
        let mut r = rng(3);
        for _ in 0..1000 {
            let ls = window_lengths(37, 5, &mut r);
            assert_eq!(ls.len(), 5);
            assert_eq!(ls.iter().sum::<usize>(), 37);
            assert!(ls.iter().all(|&l| l >= 1));
        }
        assert_eq!(window_lengths(3, 10, &mut r), [1, 1, 1]);
    }

    #[test]
    fn propagation_covers_edges() {
        let g = crate::graph::tests::figure_graph();
        let m = assign_propagation(&g, 1.0, &mut rng(0));
        assert_eq!(m.0, [true; 5]);
        let m = assign_propagation(&g, 0.0, &mut rng(0));
        let self_loop: Vec<bool> = g.edges().iter().map(Edge::is_self_loop).collect();
        assert_eq!(m.0, self_loop);
        let empty = DependencyGraph::new(1, alloc::vec![alloc::vec![0]], Vec::new());
        assert!(assign_propagation(&empty, 0.5, &mut rng(0)).0.is_empty());
    }

    use crate::graph::Edge;

    #[test]
    fn deletion_prefers_median_depth() {
        // perfect binary tree of depth 3: non-root depths 1,1,2×4,3×8 → median 3
        let leaf = || Expr::Time;
        let l2 = || Expr::binary(BinaryOp::Add, leaf(), leaf());
        let l1 = || Expr::binary(BinaryOp::Mul, l2(), l2());
        let tree = Expr::binary(BinaryOp::Sub, l1(), l1());
        assert_eq!(tree.size(), 15);
        let depths = tree.node_depths();
        let mut r = rng(5);
        for _ in 0..10_000 {
            let i = select_deletion_node(&tree, &mut r).unwrap();
            assert!(i >= 1);
            assert!((2..=3).contains(&depths[i]));
        }
        let two = Expr::unary(UnaryOp::Sin, Expr::Time);
        assert_eq!(select_deletion_node(&two, &mut r), Ok(1));
        assert_eq!(select_deletion_node(&Expr::Time, &mut r), Err(AnomalyError::NoCandidate));
    }

    #[test]
    fn replace_changes_the_operator() {
        let f = parse_expression("sin(t)", 1).unwrap();
        let mut r = rng(6);
        for _ in 0..200 {
            let g = replace_operator(&f, &mut r).unwrap();
            match g {
                Expr::Unary(op, ref c) => {
                    assert_ne!(op, UnaryOp::Sin);
                    assert_eq!(**c, Expr::Time);
                }
                _ => panic!("arity changed"),
            }
        }
    }

    #[test]
    fn insert_on_a_constant_wraps_it() {
        let f = Expr::Const(2.0);
        let p = FunctionParams::default();
        let mut r = rng(7);
        for _ in 0..200 {
            match insert_subtree(&f, &[0], &p, &mut r) {
                Expr::Binary(_, l, s) => {
                    assert_eq!(*l, Expr::Const(2.0));
                    assert!(s.depth() <= 2);
                }
                other => panic!("unexpected {other}"),
            }
        }
    }

    #[test]
    fn fallback_offsets_the_equation() {
        let f = parse_expression("sin(t)", 1).unwrap();
        let c = contaminate(&f, &[], &FunctionParams::default(), &mut rng(8), |_| false);
        assert_eq!(c.strategy, MutationStrategy::ConstantOffset);
        match c.mutated {
            Expr::Binary(BinaryOp::Add, l, r) => {
                assert_eq!(*l, f);
                let Expr::Const(k) = *r else { panic!() };
                assert!((2.0..=5.0).contains(&libm::fabs(k)));
            }
            _ => panic!("expected offset"),
        }
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in MutationStrategy::TREE {
            assert_eq!(s.as_str().parse::<MutationStrategy>(), Ok(s));
        }
        assert!("bogus".parse::<MutationStrategy>().is_err());
    }
}
