//! Random generative functions.
//!
//! A function is grown bottom-up: the operand pool starts with the parent
//! reads and a few constants, then operands are repeatedly wrapped by unary
//! operators or merged pairwise by binary ones until a single tree remains.
//! Operator sampling is tilted by the cumulative growth score of the chosen
//! operand so that already-amplifying operands favor attenuating operators.

use alloc::vec::Vec;

use rand::seq::IndexedRandom;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::expr::{
    catalog, BinaryOp, EvalContext, Expr, Operator, OperatorSpec, WindowKind, ZeroHistory,
    CLAMP_BOUND,
};
use crate::params::GenerationParams;

/// Tilt strength of the growth-score weighting.
pub const GROWTH_LAMBDA: f64 = 0.5;
/// Operator weights are clipped to this range before normalization.
pub const WEIGHT_CLIP: (f64, f64) = (0.01, 100.0);
/// Unary wraps one pool element may receive before only binary merges are
/// allowed for it.
pub const MAX_UNARY_WRAPS: u8 = 3;
/// Attempts at producing a non-constant exogenous function.
pub const REROLL_LIMIT: usize = 100;
/// Range of generated constants, rounded to two decimals.
pub const CONST_RANGE: (f64, f64) = (-5.0, 5.0);

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FuncGenError {
    #[error("no non-constant function found after {0} attempts")]
    GenerationExhausted(usize),
}

/// Knobs of function synthesis taken from [`GenerationParams`].
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct FunctionParams {
    pub max_lag: usize,
    pub n_const: usize,
    pub enable_window_agg: bool,
    /// Number of timesteps the equation will be evaluated on; candidates
    /// that saturate the clamp bound on zero history within it are redrawn.
    pub horizon: usize,
}

impl From<&GenerationParams> for FunctionParams {
    fn from(p: &GenerationParams) -> Self {
        FunctionParams {
            max_lag: p.max_lag.max(1),
            n_const: p.n_const,
            enable_window_agg: p.enable_window_agg,
            horizon: p.train_length + p.test_length,
        }
    }
}

impl Default for FunctionParams {
    fn default() -> Self {
        FunctionParams::from(&GenerationParams::default())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Operand {
    pub expr: Expr,
    pub unary_wraps: u8,
}

/// Working set of partial expressions.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct OperandPool {
    pub items: Vec<Operand>,
}

impl OperandPool {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    fn push(&mut self, expr: Expr) {
        self.items.push(Operand {
            expr,
            unary_wraps: 0,
        });
    }

    fn pop_random<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Operand {
        let i = rng.random_range(0..self.items.len());
        self.items.swap_remove(i)
    }
}

pub fn random_constant<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let x = rng.random_range(CONST_RANGE.0..=CONST_RANGE.1);
    libm::round(x * 100.0) / 100.0
}

fn random_lag<R: Rng + ?Sized>(max_lag: usize, rng: &mut R) -> usize {
    rng.random_range(1..=max_lag.max(1))
}

fn random_window<R: Rng + ?Sized>(var: usize, max_lag: usize, rng: &mut R) -> Expr {
    let kind = *[WindowKind::Integral, WindowKind::Sum, WindowKind::Mean]
        .choose(rng)
        .unwrap();
    let lag_from = rng.random_range(2..=max_lag);
    let lag_to = rng.random_range(1..lag_from);
    Expr::window(kind, var, lag_from, lag_to)
}

/// Initial operands: one lagged read per parent, `n_const` constants, a
/// `t - lag` leaf for exogenous variables and, when enabled, possibly one
/// window aggregate over a parent. Always at least two operands.
pub fn initialize_leaves<R: Rng + ?Sized>(
    parents: &[usize],
    params: &FunctionParams,
    rng: &mut R,
) -> OperandPool {
    let mut pool = OperandPool::default();
    for &p in parents {
        pool.push(Expr::var(p, random_lag(params.max_lag, rng)));
    }
    for _ in 0..params.n_const {
        pool.push(Expr::Const(random_constant(rng)));
    }
    if parents.is_empty() {
        pool.push(Expr::shifted_time(random_lag(params.max_lag, rng) as f64));
    } else if params.enable_window_agg && params.max_lag >= 2 && rng.random_bool(0.5) {
        let &p = parents.choose(rng).unwrap();
        pool.push(random_window(p, params.max_lag, rng));
    }
    while pool.len() < 2 {
        pool.push(Expr::Const(random_constant(rng)));
    }
    pool
}

/// Sampling weight of every catalog entry for an operand with the given
/// cumulative growth score: `exp(-λ·s·g)` clipped to [`WEIGHT_CLIP`].
pub fn operator_weights(operand_score: i32) -> Vec<f64> {
    catalog()
        .iter()
        .map(|spec| {
            let w = libm::exp(-GROWTH_LAMBDA * operand_score as f64 * spec.growth_score as f64);
            w.clamp(WEIGHT_CLIP.0, WEIGHT_CLIP.1)
        })
        .collect()
}

fn pick_weighted<R: Rng + ?Sized>(
    operand_score: i32,
    allow: impl Fn(&OperatorSpec) -> bool,
    rng: &mut R,
) -> &'static OperatorSpec {
    let weights = catalog()
        .iter()
        .zip(operator_weights(operand_score))
        .map(|(spec, w)| if allow(spec) { w } else { 0.0 });
    let index = WeightedIndex::new(weights).expect("at least one operator allowed");
    &catalog()[index.sample(rng)]
}

/// Draws an operator from the full catalog, tilted by `operand_score`.
pub fn pick_operator_weighted<R: Rng + ?Sized>(
    operand_score: i32,
    rng: &mut R,
) -> &'static OperatorSpec {
    pick_weighted(operand_score, |_| true, rng)
}

/// Pow is drawn with a constant exponent and so behaves like a unary wrap.
fn wraps_single_operand(op: Operator) -> bool {
    matches!(op, Operator::Unary(_) | Operator::Binary(BinaryOp::Pow))
}

/// One merge: pop an operand, draw an operator for it, and either wrap it
/// (unary, or pow with exponent 2 or 3) or combine it with a second operand.
pub fn merge_step<R: Rng + ?Sized>(mut pool: OperandPool, rng: &mut R) -> OperandPool {
    debug_assert!(pool.len() >= 2, "merge_step needs two operands");
    let first = pool.pop_random(rng);
    let score = first.expr.cumulative_growth_score();
    let spec = if first.unary_wraps >= MAX_UNARY_WRAPS {
        pick_weighted(score, |s| !wraps_single_operand(s.op), rng)
    } else {
        pick_weighted(score, |_| true, rng)
    };
    let merged = match spec.op {
        Operator::Unary(op) => Operand {
            expr: Expr::unary(op, first.expr),
            unary_wraps: first.unary_wraps + 1,
        },
        Operator::Binary(BinaryOp::Pow) => {
            let exponent = if rng.random_bool(0.5) { 2.0 } else { 3.0 };
            Operand {
                expr: Expr::binary(BinaryOp::Pow, first.expr, Expr::Const(exponent)),
                unary_wraps: first.unary_wraps + 1,
            }
        }
        Operator::Binary(op) => {
            let second = pool.pop_random(rng);
            Operand {
                expr: Expr::binary(op, first.expr, second.expr),
                unary_wraps: 0,
            }
        }
    };
    pool.items.push(merged);
    pool
}

fn grow<R: Rng + ?Sized>(mut pool: OperandPool, rng: &mut R) -> Expr {
    while pool.len() > 1 {
        pool = merge_step(pool, rng);
    }
    pool.items.pop().expect("pool is never empty").expr
}

fn is_time_varying(e: &Expr) -> bool {
    let first = e.evaluate(&EvalContext::new(0, &ZeroHistory));
    (1..100).any(|t| e.evaluate(&EvalContext::new(t, &ZeroHistory)) != first)
}

/// Timesteps probed by the saturation screen: the first 100 and an even
/// grid over the rest of the horizon.
fn probe_times(horizon: usize) -> impl Iterator<Item = i64> {
    const GRID: usize = 128;
    let head = horizon.min(100);
    let step = (horizon / GRID).max(1);
    (0..head).chain((head..horizon).step_by(step)).chain(horizon.checked_sub(1)).map(|t| t as i64)
}

fn saturates(e: &Expr, horizon: usize) -> bool {
    probe_times(horizon).any(|t| {
        libm::fabs(e.evaluate(&EvalContext::new(t, &ZeroHistory))) >= CLAMP_BOUND
    })
}

fn covers_parents(e: &Expr, parents: &[usize]) -> bool {
    let lags = e.required_lags();
    parents.iter().all(|p| lags.contains_key(p)) && lags.keys().all(|v| parents.contains(v))
}

/// Generates the equation of one variable reading `parents` (sorted, may be
/// empty). Exogenous equations depend on `t` and are non-constant over the
/// first 100 timesteps. No candidate may hit the clamp bound on zero
/// history within the horizon.
pub fn generate_function<R: Rng + ?Sized>(
    parents: &[usize],
    params: &FunctionParams,
    rng: &mut R,
) -> Result<Expr, FuncGenError> {
    for _ in 0..REROLL_LIMIT {
        let e = grow(initialize_leaves(parents, params, rng), rng);
        let ok = if parents.is_empty() {
            e.contains_time() && is_time_varying(&e)
        } else {
            covers_parents(&e, parents)
        };
        if ok && !saturates(&e, params.horizon) {
            return Ok(e);
        }
    }
    Err(FuncGenError::GenerationExhausted(REROLL_LIMIT))
}

/// Small random expression of depth at most 2 over `parents` (or `t` when
/// there are none), used when inserting subtrees into an equation.
pub fn random_subtree<R: Rng + ?Sized>(
    parents: &[usize],
    params: &FunctionParams,
    rng: &mut R,
) -> Expr {
    let leaf = match parents.choose(rng) {
        Some(&p) => Expr::var(p, random_lag(params.max_lag, rng)),
        None => Expr::shifted_time(random_lag(params.max_lag, rng) as f64),
    };
    let mut pool = OperandPool::default();
    pool.push(leaf);
    pool.push(Expr::Const(random_constant(rng)));
    // after a wrap the pool still holds the untouched operand; keep the wrapped one
    merge_step(pool, rng)
        .items
        .into_iter()
        .max_by_key(|o| o.unary_wraps)
        .expect("pool is never empty")
        .expr
}
