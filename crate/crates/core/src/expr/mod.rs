//! Symbolic expressions over lagged variables.
//!
//! An [`Expr`] is the generative equation of one variable. Leaves are
//! constants, the time index `t`, lagged variable reads `x{v}[t-k]` and
//! windowed aggregates over a variable's recent past. Every read is strictly
//! in the past (lag ≥ 1), which lets a whole system be evaluated one timestep
//! at a time regardless of cycles in the dependency graph.

mod display;
mod eval;
mod ops;
mod parse;

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

pub use eval::{EvalContext, History, ZeroHistory, CLAMP_BOUND, GUARD_EPSILON};
pub use ops::{catalog, BinaryOp, Operator, OperatorSpec, UnaryOp};
pub use parse::{parse_expression, ParseError};

/// Aggregation applied over a lag window of one variable.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum WindowKind {
    /// Trapezoidal integral of the variable with respect to itself.
    Integral,
    Sum,
    Mean,
}

impl WindowKind {
    pub fn keyword(self) -> &'static str {
        match self {
            WindowKind::Integral => "integral",
            WindowKind::Sum => "wsum",
            WindowKind::Mean => "wmean",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Time,
    Var {
        var: usize,
        lag: usize,
    },
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    /// Aggregate of `var` over timesteps `t - lag_from ..= t - lag_to`,
    /// with `lag_from > lag_to >= 1`.
    Window {
        kind: WindowKind,
        var: usize,
        lag_from: usize,
        lag_to: usize,
    },
}

impl Expr {
    pub fn constant(value: f64) -> Expr {
        Expr::Const(value)
    }

    pub fn var(var: usize, lag: usize) -> Expr {
        Expr::Var { var, lag }
    }

    pub fn unary(op: UnaryOp, child: Expr) -> Expr {
        Expr::Unary(op, Box::new(child))
    }

    pub fn binary(op: BinaryOp, left: Expr, right: Expr) -> Expr {
        Expr::Binary(op, Box::new(left), Box::new(right))
    }

    pub fn window(kind: WindowKind, var: usize, lag_from: usize, lag_to: usize) -> Expr {
        Expr::Window {
            kind,
            var,
            lag_from,
            lag_to,
        }
    }

    /// `t - lag`, the time-bearing leaf used by exogenous equations.
    pub fn shifted_time(lag: f64) -> Expr {
        Expr::binary(BinaryOp::Sub, Expr::Time, Expr::Const(lag))
    }

    pub fn is_leaf(&self) -> bool {
        !matches!(self, Expr::Unary(..) | Expr::Binary(..))
    }

    pub fn operator(&self) -> Option<Operator> {
        match self {
            Expr::Unary(op, _) => Some(Operator::Unary(*op)),
            Expr::Binary(op, _, _) => Some(Operator::Binary(*op)),
            _ => None,
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Expr::Unary(_, c) => 1 + c.size(),
            Expr::Binary(_, l, r) => 1 + l.size() + r.size(),
            _ => 1,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Expr::Unary(_, c) => 1 + c.depth(),
            Expr::Binary(_, l, r) => 1 + l.depth().max(r.depth()),
            _ => 0,
        }
    }

    /// Depth of every node, listed in preorder. The root has depth 0.
    pub fn node_depths(&self) -> Vec<usize> {
        fn walk(e: &Expr, depth: usize, out: &mut Vec<usize>) {
            out.push(depth);
            match e {
                Expr::Unary(_, c) => walk(c, depth + 1, out),
                Expr::Binary(_, l, r) => {
                    walk(l, depth + 1, out);
                    walk(r, depth + 1, out);
                }
                _ => {}
            }
        }
        let mut out = Vec::with_capacity(self.size());
        walk(self, 0, &mut out);
        out
    }

    /// The node at preorder position `index`.
    pub fn node(&self, index: usize) -> Option<&Expr> {
        fn walk<'a>(e: &'a Expr, index: &mut usize) -> Option<&'a Expr> {
            if *index == 0 {
                return Some(e);
            }
            *index -= 1;
            match e {
                Expr::Unary(_, c) => walk(c, index),
                Expr::Binary(_, l, r) => walk(l, index).or_else(|| walk(r, index)),
                _ => None,
            }
        }
        let mut i = index;
        walk(self, &mut i)
    }

    /// Mutable access to the node at preorder position `index`.
    pub fn node_mut(&mut self, index: usize) -> Option<&mut Expr> {
        fn walk<'a>(e: &'a mut Expr, index: &mut usize) -> Option<&'a mut Expr> {
            if *index == 0 {
                return Some(e);
            }
            *index -= 1;
            match e {
                Expr::Unary(_, c) => walk(c, index),
                Expr::Binary(_, l, r) => {
                    let size = l.size();
                    if *index < size {
                        walk(l, index)
                    } else {
                        *index -= size;
                        walk(r, index)
                    }
                }
                _ => None,
            }
        }
        let mut i = index;
        walk(self, &mut i)
    }

    /// Sum of operator growth scores, where `sin` and `cos` cap whatever
    /// grows beneath them and so contribute 0 for their whole subtree.
    pub fn cumulative_growth_score(&self) -> i32 {
        match self {
            Expr::Unary(op, _) if op.resets_growth() => 0,
            Expr::Unary(op, c) => op.growth_score() + c.cumulative_growth_score(),
            Expr::Binary(op, l, r) => {
                op.growth_score() + l.cumulative_growth_score() + r.cumulative_growth_score()
            }
            _ => 0,
        }
    }

    /// Maximum lag per referenced variable. Windows count with `lag_from`.
    pub fn required_lags(&self) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        self.for_each_read(&mut |var, lag| {
            let entry = out.entry(var).or_insert(lag);
            *entry = (*entry).max(lag);
        });
        out
    }

    /// Largest lag anywhere in the tree, 0 for a lag-free expression.
    pub fn max_lag(&self) -> usize {
        let mut max = 0;
        self.for_each_read(&mut |_, lag| max = max.max(lag));
        max
    }

    /// Every `(variable, lag)` pair the expression reads, windows expanded
    /// to each lag they touch. Sorted and deduplicated.
    pub fn read_set(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        self.visit(&mut |e| match *e {
            Expr::Var { var, lag } => out.push((var, lag)),
            Expr::Window {
                var,
                lag_from,
                lag_to,
                ..
            } => out.extend((lag_to..=lag_from).map(|lag| (var, lag))),
            _ => {}
        });
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Calls `f(var, max_lag_of_node)` for each variable-reading leaf.
    fn for_each_read(&self, f: &mut impl FnMut(usize, usize)) {
        self.visit(&mut |e| match *e {
            Expr::Var { var, lag } => f(var, lag),
            Expr::Window { var, lag_from, .. } => f(var, lag_from),
            _ => {}
        });
    }

    /// Preorder traversal.
    pub fn visit(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Unary(_, c) => c.visit(f),
            Expr::Binary(_, l, r) => {
                l.visit(f);
                r.visit(f);
            }
            _ => {}
        }
    }

    pub fn contains_time(&self) -> bool {
        let mut found = false;
        self.visit(&mut |e| found |= matches!(e, Expr::Time));
        found
    }

    /// Checks the structural invariants: lags ≥ 1, non-empty windows,
    /// finite constants and variable ids below `d`.
    pub fn validate(&self, d: usize) -> Result<(), InvalidExpr> {
        let mut err = None;
        self.visit(&mut |e| {
            if err.is_some() {
                return;
            }
            err = match *e {
                Expr::Const(c) if !c.is_finite() => Some(InvalidExpr::NonFiniteConstant),
                Expr::Var { var, .. } | Expr::Window { var, .. } if var >= d => {
                    Some(InvalidExpr::UnknownVariable { var, d })
                }
                Expr::Var { lag: 0, var } => Some(InvalidExpr::ZeroLag { var }),
                Expr::Window {
                    var,
                    lag_from,
                    lag_to,
                    ..
                } if lag_to == 0 || lag_from <= lag_to => Some(InvalidExpr::EmptyWindow { var }),
                _ => None,
            };
        });
        err.map_or(Ok(()), Err)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum InvalidExpr {
    #[error("constant is not finite")]
    NonFiniteConstant,
    #[error("variable x{var} does not exist (d = {d})")]
    UnknownVariable { var: usize, d: usize },
    #[error("x{var} is read with lag 0")]
    ZeroLag { var: usize },
    #[error("window over x{var} must satisfy lag_from > lag_to >= 1")]
    EmptyWindow { var: usize },
}
