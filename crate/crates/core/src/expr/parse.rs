//! Recursive-descent parser for the equation language.
//!
//! ```text
//! expr   = term { ("+"|"-") term } ;
//! term   = factor { ("*"|"/") factor } ;
//! factor = "-" factor | power ;
//! power  = atom [ "^" factor ] ;
//! atom   = NUMBER | "t" | varref | func "(" expr ")" | agg | "(" expr ")" ;
//! varref = "x" INT "[" "t" "-" INT "]" ;
//! agg    = ("integral"|"wsum"|"wmean") "(" "x" INT "," INT "," INT ")" ;
//! ```
//!
//! A minus sign directly in front of a number literal is folded into a
//! negative constant unless the literal is the base of a power, so `-2^2`
//! still means `-(2^2)`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{BinaryOp, Expr, UnaryOp, WindowKind};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at position {position}: expected {expected}, found {found}")]
    Syntax {
        position: usize,
        expected: String,
        found: String,
    },
    #[error("unknown variable x{var} at position {position} (d = {d})")]
    UnknownVariable { var: usize, d: usize, position: usize },
    #[error("x{var} read with lag 0 at position {position}; lags must be >= 1")]
    ZeroLag { var: usize, position: usize },
    #[error("unknown function '{name}' at position {position}")]
    UnknownFunction { name: String, position: usize },
    #[error("invalid window at position {position}: lag_from must exceed lag_to >= 1")]
    InvalidWindow { position: usize },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match *self {
            ParseError::Syntax { position, .. }
            | ParseError::UnknownVariable { position, .. }
            | ParseError::ZeroLag { position, .. }
            | ParseError::UnknownFunction { position, .. }
            | ParseError::InvalidWindow { position } => position,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Number { value: f64, integer: Option<usize> },
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    End,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Number { value, .. } => alloc::format!("number {value}"),
            Token::Ident(s) => alloc::format!("'{s}'"),
            Token::Plus => "'+'".into(),
            Token::Minus => "'-'".into(),
            Token::Star => "'*'".into(),
            Token::Slash => "'/'".into(),
            Token::Caret => "'^'".into(),
            Token::LParen => "'('".into(),
            Token::RParen => "')'".into(),
            Token::LBracket => "'['".into(),
            Token::RBracket => "']'".into(),
            Token::Comma => "','".into(),
            Token::End => "end of input".into(),
        }
    }
}

fn syntax(position: usize, expected: &str, found: &str) -> ParseError {
    ParseError::Syntax {
        position,
        expected: expected.to_string(),
        found: found.to_string(),
    }
}

fn tokenize(text: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b'+' => Some(Token::Plus),
            b'-' => Some(Token::Minus),
            b'*' => Some(Token::Star),
            b'/' => Some(Token::Slash),
            b'^' => Some(Token::Caret),
            b'(' => Some(Token::LParen),
            b')' => Some(Token::RParen),
            b'[' => Some(Token::LBracket),
            b']' => Some(Token::RBracket),
            b',' => Some(Token::Comma),
            _ => None,
        };
        if let Some(tok) = single {
            out.push((tok, start));
            i += 1;
        } else if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == b'.' {
            let mut integer = true;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                integer = false;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    integer = false;
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let lit = &text[start..i];
            let value: f64 = lit
                .parse()
                .map_err(|_| syntax(start, "number", &alloc::format!("'{lit}'")))?;
            if !value.is_finite() {
                return Err(syntax(start, "finite number", &alloc::format!("'{lit}'")));
            }
            let integer = if integer {
                Some(lit.parse::<usize>().unwrap_or(usize::MAX))
            } else {
                None
            };
            out.push((Token::Number { value, integer }, start));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Token::Ident(text[start..i].to_string()), start));
        } else {
            let ch = text[start..].chars().next().unwrap_or('?');
            return Err(syntax(start, "expression", &alloc::format!("'{ch}'")));
        }
    }
    out.push((Token::End, text.len()));
    Ok(out)
}

/// `x<digits>` names a variable.
fn variable_index(ident: &str) -> Option<usize> {
    let digits = ident.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Some(digits.parse().unwrap_or(usize::MAX))
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    d: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn peek_at(&self, ahead: usize) -> &Token {
        let i = (self.pos + ahead).min(self.tokens.len() - 1);
        &self.tokens[i].0
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].1
    }

    fn advance(&mut self) -> (Token, usize) {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        syntax(self.offset(), expected, &self.peek().describe())
    }

    fn expect(&mut self, tok: Token, expected: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.advance();
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn expect_int(&mut self) -> Result<(usize, usize), ParseError> {
        match *self.peek() {
            Token::Number {
                integer: Some(n), ..
            } => {
                let at = self.offset();
                self.advance();
                Ok((n, at))
            }
            _ => Err(self.unexpected("integer")),
        }
    }

    fn expect_variable(&mut self) -> Result<usize, ParseError> {
        let at = self.offset();
        let var = match self.peek() {
            Token::Ident(s) => variable_index(s),
            _ => None,
        };
        let var = var.ok_or_else(|| self.unexpected("variable 'x<index>'"))?;
        if var >= self.d {
            return Err(ParseError::UnknownVariable {
                var,
                d: self.d,
                position: at,
            });
        }
        self.advance();
        Ok(var)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Token::Plus => BinaryOp::Add,
                Token::Minus => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.advance();
            lhs = Expr::binary(op, lhs, self.term()?);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Token::Star => BinaryOp::Mul,
                Token::Slash => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.advance();
            lhs = Expr::binary(op, lhs, self.factor()?);
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() != Token::Minus {
            return self.power();
        }
        self.advance();
        if let Token::Number { value, .. } = *self.peek() {
            if *self.peek_at(1) != Token::Caret {
                self.advance();
                return Ok(Expr::Const(-value));
            }
        }
        Ok(Expr::unary(UnaryOp::Neg, self.factor()?))
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() == Token::Caret {
            self.advance();
            let exponent = self.factor()?;
            return Ok(Expr::binary(BinaryOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        match self.peek().clone() {
            Token::Number { value, .. } => {
                self.advance();
                Ok(Expr::Const(value))
            }
            Token::LParen => {
                self.advance();
                let inner = self.expr()?;
                self.expect(Token::RParen, "')'")?;
                Ok(inner)
            }
            Token::Ident(name) => {
                if name == "t" {
                    self.advance();
                    return Ok(Expr::Time);
                }
                if variable_index(&name).is_some() {
                    return self.varref();
                }
                let kind = match name.as_str() {
                    "integral" => Some(WindowKind::Integral),
                    "wsum" => Some(WindowKind::Sum),
                    "wmean" => Some(WindowKind::Mean),
                    _ => None,
                };
                if let Some(kind) = kind {
                    self.advance();
                    return self.window(kind, at);
                }
                if let Some(op) = UnaryOp::from_function_name(&name) {
                    self.advance();
                    self.expect(Token::LParen, "'('")?;
                    let arg = self.expr()?;
                    self.expect(Token::RParen, "')'")?;
                    return Ok(Expr::unary(op, arg));
                }
                if *self.peek_at(1) == Token::LParen {
                    Err(ParseError::UnknownFunction {
                        name,
                        position: at,
                    })
                } else {
                    Err(self.unexpected("expression"))
                }
            }
            _ => Err(self.unexpected("expression")),
        }
    }

    fn varref(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        let var = self.expect_variable()?;
        self.expect(Token::LBracket, "'['")?;
        match self.peek() {
            Token::Ident(s) if s == "t" => {
                self.advance();
            }
            _ => return Err(self.unexpected("'t'")),
        }
        if *self.peek() == Token::RBracket {
            return Err(ParseError::ZeroLag { var, position: at });
        }
        self.expect(Token::Minus, "'-'")?;
        let (lag, _) = self.expect_int()?;
        self.expect(Token::RBracket, "']'")?;
        if lag == 0 {
            return Err(ParseError::ZeroLag { var, position: at });
        }
        Ok(Expr::var(var, lag))
    }

    fn window(&mut self, kind: WindowKind, at: usize) -> Result<Expr, ParseError> {
        self.expect(Token::LParen, "'('")?;
        let var = self.expect_variable()?;
        self.expect(Token::Comma, "','")?;
        let (lag_from, _) = self.expect_int()?;
        self.expect(Token::Comma, "','")?;
        let (lag_to, _) = self.expect_int()?;
        self.expect(Token::RParen, "')'")?;
        if lag_to == 0 || lag_from <= lag_to {
            return Err(ParseError::InvalidWindow { position: at });
        }
        Ok(Expr::window(kind, var, lag_from, lag_to))
    }
}

/// Parses one equation for a system of `d` variables.
pub fn parse_expression(text: &str, d: usize) -> Result<Expr, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0, d };
    let e = parser.expr()?;
    if *parser.peek() != Token::End {
        return Err(parser.unexpected("operator or end of input"));
    }
    Ok(e)
}
