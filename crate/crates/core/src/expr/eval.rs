use super::{BinaryOp, Expr, UnaryOp, WindowKind};

/// Every evaluated node is clamped to `[-CLAMP_BOUND, CLAMP_BOUND]`.
pub const CLAMP_BOUND: f64 = 1e12;

/// Smallest magnitude admitted as a divisor, log argument offset or
/// negative-power base.
pub const GUARD_EPSILON: f64 = 1e-8;

/// Read access to already computed values.
///
/// Implementations must return `0.0` for timesteps before the start of the
/// recorded history.
pub trait History {
    fn value(&self, var: usize, t: i64) -> f64;
}

/// A history in which every past value is zero.
#[derive(Copy, Clone, Debug, Default)]
pub struct ZeroHistory;

impl History for ZeroHistory {
    fn value(&self, _var: usize, _t: i64) -> f64 {
        0.0
    }
}

impl<H: History + ?Sized> History for &H {
    fn value(&self, var: usize, t: i64) -> f64 {
        (**self).value(var, t)
    }
}

/// Timestep being evaluated plus a view of the past.
#[derive(Copy, Clone, Debug)]
pub struct EvalContext<'a, H: ?Sized> {
    pub t: i64,
    pub history: &'a H,
}

impl<'a, H: History + ?Sized> EvalContext<'a, H> {
    pub fn new(t: i64, history: &'a H) -> Self {
        EvalContext { t, history }
    }
}

#[inline]
fn clamp(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(-CLAMP_BOUND, CLAMP_BOUND)
    }
}

#[inline]
fn sign(v: f64) -> f64 {
    if v < 0.0 {
        -1.0
    } else {
        1.0
    }
}

pub(crate) fn apply_unary(op: UnaryOp, x: f64) -> f64 {
    let y = match op {
        UnaryOp::Sin => libm::sin(x),
        UnaryOp::Cos => libm::cos(x),
        UnaryOp::Tan => libm::tan(x),
        UnaryOp::Exp => libm::exp(x),
        UnaryOp::Log => libm::log(libm::fabs(x) + GUARD_EPSILON),
        UnaryOp::Sqrt => libm::sqrt(libm::fabs(x)),
        UnaryOp::Abs => libm::fabs(x),
        UnaryOp::Neg => -x,
    };
    clamp(y)
}

pub(crate) fn apply_binary(op: BinaryOp, a: f64, b: f64) -> f64 {
    let y = match op {
        BinaryOp::Add => a + b,
        BinaryOp::Sub => a - b,
        BinaryOp::Mul => a * b,
        BinaryOp::Div => a / (sign(b) * libm::fabs(b).max(GUARD_EPSILON)),
        BinaryOp::Pow => {
            let base = if b < 0.0 {
                libm::fabs(a).max(GUARD_EPSILON)
            } else {
                libm::fabs(a)
            };
            sign(a) * libm::pow(base, b)
        }
    };
    clamp(y)
}

impl Expr {
    /// Evaluates the expression at `ctx.t`. Never fails: domain guards keep
    /// every operator total and each node is clamped to [`CLAMP_BOUND`].
    pub fn evaluate<H: History + ?Sized>(&self, ctx: &EvalContext<'_, H>) -> f64 {
        self.eval_at(ctx.t, ctx.history)
    }

    pub(crate) fn eval_at<H: History + ?Sized>(&self, t: i64, h: &H) -> f64 {
        match *self {
            Expr::Const(c) => clamp(c),
            Expr::Time => clamp(t as f64),
            Expr::Var { var, lag } => clamp(h.value(var, t - lag as i64)),
            Expr::Unary(op, ref c) => apply_unary(op, c.eval_at(t, h)),
            Expr::Binary(op, ref l, ref r) => apply_binary(op, l.eval_at(t, h), r.eval_at(t, h)),
            Expr::Window {
                kind,
                var,
                lag_from,
                lag_to,
            } => {
                let read = |k: usize| h.value(var, t - k as i64);
                let v = match kind {
                    WindowKind::Integral => (lag_to..lag_from)
                        .map(|k| {
                            let (hi, lo) = (read(k), read(k + 1));
                            0.5 * (hi + lo) * (hi - lo)
                        })
                        .sum(),
                    WindowKind::Sum => (lag_to..=lag_from).map(read).sum(),
                    WindowKind::Mean => {
                        let n = (lag_from - lag_to + 1) as f64;
                        (lag_to..=lag_from).map(read).sum::<f64>() / n
                    }
                };
                clamp(v)
            }
        }
    }
}
