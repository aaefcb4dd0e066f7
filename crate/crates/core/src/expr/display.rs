use core::fmt::{self, Write};

use super::{BinaryOp, Expr, UnaryOp};

// Binding strength, loosest first. Mirrors the grammar accepted by the parser.
const ADDITIVE: u8 = 1;
const MULTIPLICATIVE: u8 = 2;
const PREFIX: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

fn level(e: &Expr) -> u8 {
    match e {
        Expr::Const(c) if c.is_sign_negative() => PREFIX,
        Expr::Unary(UnaryOp::Neg, _) => PREFIX,
        Expr::Binary(BinaryOp::Add | BinaryOp::Sub, ..) => ADDITIVE,
        Expr::Binary(BinaryOp::Mul | BinaryOp::Div, ..) => MULTIPLICATIVE,
        Expr::Binary(BinaryOp::Pow, ..) => POWER,
        _ => ATOM,
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        f.write_char('(')?;
        write_expr(f, e)?;
        f.write_char(')')
    } else {
        write_expr(f, e)
    }
}

fn write_expr(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    match e {
        Expr::Const(c) => write!(f, "{c}"),
        Expr::Time => f.write_char('t'),
        Expr::Var { var, lag } => write!(f, "x{var}[t-{lag}]"),
        Expr::Window {
            kind,
            var,
            lag_from,
            lag_to,
        } => write!(f, "{}(x{var},{lag_from},{lag_to})", kind.keyword()),
        Expr::Unary(UnaryOp::Neg, c) => {
            f.write_char('-')?;
            write_operand(f, c, level(c) < PREFIX)
        }
        Expr::Unary(op, c) => {
            write!(f, "{}(", op.name())?;
            write_expr(f, c)?;
            f.write_char(')')
        }
        Expr::Binary(BinaryOp::Pow, base, exp) => {
            write_operand(f, base, level(base) < ATOM)?;
            f.write_char('^')?;
            write_operand(f, exp, level(exp) < PREFIX)
        }
        Expr::Binary(op, l, r) => {
            let own = level(e);
            write_operand(f, l, level(l) < own)?;
            match op {
                BinaryOp::Add | BinaryOp::Sub => write!(f, " {} ", op.symbol())?,
                _ => f.write_char(op.symbol())?,
            }
            write_operand(f, r, level(r) <= own)
        }
    }
}

/// Canonical expression-language text with minimal parentheses.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::WindowKind;
    use alloc::string::ToString;

    #[test]
    fn leaves() {
        assert_eq!(Expr::Const(2.0).to_string(), "2");
        assert_eq!(Expr::Const(-0.25).to_string(), "-0.25");
        assert_eq!(Expr::var(3, 3).to_string(), "x3[t-3]");
        assert_eq!(
            Expr::window(WindowKind::Integral, 2, 3, 1).to_string(),
            "integral(x2,3,1)"
        );
    }

    #[test]
    fn minimal_parentheses() {
        let e = Expr::binary(
            BinaryOp::Div,
            Expr::unary(
                UnaryOp::Cos,
                Expr::binary(BinaryOp::Mul, Expr::Const(9.0), Expr::shifted_time(4.0)),
            ),
            Expr::unary(UnaryOp::Sin, Expr::Const(9.0)),
        );
        assert_eq!(e.to_string(), "cos(9*(t - 4))/sin(9)");

        let left_assoc = Expr::binary(
            BinaryOp::Sub,
            Expr::binary(BinaryOp::Sub, Expr::Time, Expr::Const(1.0)),
            Expr::binary(BinaryOp::Sub, Expr::Time, Expr::Const(2.0)),
        );
        assert_eq!(left_assoc.to_string(), "t - 1 - (t - 2)");

        let neg_base = Expr::binary(BinaryOp::Pow, Expr::Const(-2.0), Expr::Const(2.0));
        assert_eq!(neg_base.to_string(), "(-2)^2");
        let neg_pow = Expr::unary(UnaryOp::Neg, neg_base.clone());
        assert_eq!(neg_pow.to_string(), "-(-2)^2");
        let pow_chain = Expr::binary(BinaryOp::Pow, Expr::Time, neg_pow);
        assert_eq!(pow_chain.to_string(), "t^-(-2)^2");
        let neg_sum = Expr::unary(
            UnaryOp::Neg,
            Expr::binary(BinaryOp::Add, Expr::Time, Expr::Const(1.0)),
        );
        assert_eq!(neg_sum.to_string(), "-(t + 1)");
    }
}
