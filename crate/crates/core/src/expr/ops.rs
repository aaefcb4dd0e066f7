//! Operator catalog.
//!
//! Every operator carries a static growth score describing its asymptotic
//! behavior: positive scores amplify magnitude, negative scores attenuate it.
//! Function synthesis biases operator sampling with these scores so that
//! random expressions stay in a physically plausible range.

use core::fmt;

/// Single-argument operators.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnaryOp {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Abs,
    Neg,
}

/// Two-argument operators.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operator {
    Unary(UnaryOp),
    Binary(BinaryOp),
}

/// Catalog entry for one operator.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct OperatorSpec {
    pub op: Operator,
    pub name: &'static str,
    pub arity: u8,
    pub growth_score: i32,
}

impl UnaryOp {
    pub const ALL: [UnaryOp; 8] = [
        UnaryOp::Sin,
        UnaryOp::Cos,
        UnaryOp::Tan,
        UnaryOp::Exp,
        UnaryOp::Log,
        UnaryOp::Sqrt,
        UnaryOp::Abs,
        UnaryOp::Neg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Tan => "tan",
            UnaryOp::Exp => "exp",
            UnaryOp::Log => "log",
            UnaryOp::Sqrt => "sqrt",
            UnaryOp::Abs => "abs",
            UnaryOp::Neg => "neg",
        }
    }

    pub fn growth_score(self) -> i32 {
        match self {
            UnaryOp::Exp => 2,
            UnaryOp::Sqrt => -1,
            UnaryOp::Log => -2,
            UnaryOp::Sin
            | UnaryOp::Cos
            | UnaryOp::Tan
            | UnaryOp::Abs
            | UnaryOp::Neg => 0,
        }
    }

    /// Bounded-output operators discard the growth score of their operand.
    pub fn resets_growth(self) -> bool {
        matches!(self, UnaryOp::Sin | UnaryOp::Cos)
    }

    /// Looks up a function token as written in the expression language.
    /// `neg` is spelled as a prefix minus and has no function form.
    pub fn from_function_name(name: &str) -> Option<UnaryOp> {
        UnaryOp::ALL
            .into_iter()
            .find(|op| *op != UnaryOp::Neg && op.name() == name)
    }
}

impl BinaryOp {
    pub const ALL: [BinaryOp; 5] = [
        BinaryOp::Add,
        BinaryOp::Sub,
        BinaryOp::Mul,
        BinaryOp::Div,
        BinaryOp::Pow,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BinaryOp::Add => "add",
            BinaryOp::Sub => "sub",
            BinaryOp::Mul => "mul",
            BinaryOp::Div => "div",
            BinaryOp::Pow => "pow",
        }
    }

    pub fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
            BinaryOp::Pow => '^',
        }
    }

    pub fn growth_score(self) -> i32 {
        match self {
            BinaryOp::Pow => 2,
            BinaryOp::Mul => 1,
            BinaryOp::Add | BinaryOp::Sub => 0,
            BinaryOp::Div => -1,
        }
    }
}

impl Operator {
    pub fn arity(self) -> u8 {
        match self {
            Operator::Unary(_) => 1,
            Operator::Binary(_) => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Operator::Unary(op) => op.name(),
            Operator::Binary(op) => op.name(),
        }
    }

    pub fn growth_score(self) -> i32 {
        match self {
            Operator::Unary(op) => op.growth_score(),
            Operator::Binary(op) => op.growth_score(),
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

const fn unary(op: UnaryOp, name: &'static str, growth_score: i32) -> OperatorSpec {
    OperatorSpec {
        op: Operator::Unary(op),
        name,
        arity: 1,
        growth_score,
    }
}

const fn binary(op: BinaryOp, name: &'static str, growth_score: i32) -> OperatorSpec {
    OperatorSpec {
        op: Operator::Binary(op),
        name,
        arity: 2,
        growth_score,
    }
}

static CATALOG: [OperatorSpec; 13] = [
    unary(UnaryOp::Sin, "sin", 0),
    unary(UnaryOp::Cos, "cos", 0),
    unary(UnaryOp::Tan, "tan", 0),
    unary(UnaryOp::Exp, "exp", 2),
    unary(UnaryOp::Log, "log", -2),
    unary(UnaryOp::Sqrt, "sqrt", -1),
    unary(UnaryOp::Abs, "abs", 0),
    unary(UnaryOp::Neg, "neg", 0),
    binary(BinaryOp::Add, "add", 0),
    binary(BinaryOp::Sub, "sub", 0),
    binary(BinaryOp::Mul, "mul", 1),
    binary(BinaryOp::Div, "div", -1),
    binary(BinaryOp::Pow, "pow", 2),
];

/// The fixed default operator catalog.
pub fn catalog() -> &'static [OperatorSpec] {
    &CATALOG
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_is_consistent_with_operator_methods() {
        for spec in catalog() {
            assert_eq!(spec.name, spec.op.name());
            assert_eq!(spec.arity, spec.op.arity());
            assert_eq!(spec.growth_score, spec.op.growth_score());
            assert!(spec.arity == 1 || spec.arity == 2);
        }
    }

    #[test]
    fn names_are_unique() {
        let names: alloc::vec::Vec<_> = catalog().iter().map(|s| s.name).collect();
        for (i, a) in names.iter().enumerate() {
            assert!(names[i + 1..].iter().all(|b| a != b), "duplicate {a}");
        }
    }

    #[test]
    fn attenuating_and_amplifying_members() {
        let score = |n: &str| catalog().iter().find(|s| s.name == n).unwrap().growth_score;
        assert!(score("log") < 0);
        assert!(score("div") < 0);
        assert!(score("exp") > 0);
        assert!(score("mul") > 0);
    }

    #[test]
    fn function_names_exclude_neg() {
        assert_eq!(UnaryOp::from_function_name("sqrt"), Some(UnaryOp::Sqrt));
        assert_eq!(UnaryOp::from_function_name("neg"), None);
        assert_eq!(UnaryOp::from_function_name("sinh"), None);
    }
}
