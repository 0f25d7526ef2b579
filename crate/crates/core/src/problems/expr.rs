//! Arithmetic expressions over `x1..xn`: recursive-descent parser, plain
//! evaluation and forward-mode differentiation.
//!
//! Grammar, lowest precedence first:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' unary)?        exponent must be constant
//! primary := number | 'pi' | 'e' | 'x'k | ('sin'|'cos'|'exp') '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` binds tighter than unary minus, so `-x1^2` is `-(x1^2)`, and is right
//! associative through the `unary` exponent.

use std::fmt;

use thiserror::Error;

use super::dual::{pow, DualNumber};
use crate::error::ParseError;
use crate::problem::Vector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Exp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    /// Right operand is always a [`Expr::Const`].
    Pow,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    /// 0-based variable index; `x1` is `Var(0)`.
    Var(usize),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

/// Arithmetic outside the domain of an operation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct DomainError(pub String);

/// Numbers the evaluator can run on: `f64` for values, [`DualNumber`] for gradients.
trait Scalar: Sized {
    fn lift(c: f64, dim: usize) -> Self;
    fn var(u: &Vector, k: usize) -> Self;
    fn val(&self) -> f64;
    fn apply(op: UnaryOp, a: Self) -> Self;
    fn combine(op: BinaryOp, a: Self, b: Self) -> Self;
}

impl Scalar for f64 {
    fn lift(c: f64, _: usize) -> Self {
        c
    }
    fn var(u: &Vector, k: usize) -> Self {
        u[k]
    }
    fn val(&self) -> f64 {
        *self
    }
    fn apply(op: UnaryOp, a: Self) -> Self {
        match op {
            UnaryOp::Neg => -a,
            UnaryOp::Sin => a.sin(),
            UnaryOp::Cos => a.cos(),
            UnaryOp::Exp => a.exp(),
        }
    }
    fn combine(op: BinaryOp, a: Self, b: Self) -> Self {
        match op {
            BinaryOp::Add => a + b,
            BinaryOp::Sub => a - b,
            BinaryOp::Mul => a * b,
            BinaryOp::Div => a / b,
            BinaryOp::Pow => pow(a, b),
        }
    }
}

impl Scalar for DualNumber {
    fn lift(c: f64, dim: usize) -> Self {
        DualNumber::constant(c, dim)
    }
    fn var(u: &Vector, k: usize) -> Self {
        DualNumber::variable(u[k], k, u.len())
    }
    fn val(&self) -> f64 {
        self.value
    }
    fn apply(op: UnaryOp, a: Self) -> Self {
        match op {
            UnaryOp::Neg => -a,
            UnaryOp::Sin => a.sin(),
            UnaryOp::Cos => a.cos(),
            UnaryOp::Exp => a.exp(),
        }
    }
    fn combine(op: BinaryOp, a: Self, b: Self) -> Self {
        match op {
            BinaryOp::Add => a + b,
            BinaryOp::Sub => a - b,
            BinaryOp::Mul => a * b,
            BinaryOp::Div => a / b,
            BinaryOp::Pow => a.powf(b.value),
        }
    }
}

impl Expr {
    fn eval_generic<S: Scalar>(&self, u: &Vector) -> Result<S, DomainError> {
        let out = match self {
            Expr::Const(c) => S::lift(*c, u.len()),
            Expr::Var(k) => S::var(u, *k),
            Expr::Unary(op, a) => S::apply(*op, a.eval_generic(u)?),
            Expr::Binary(op, a, b) => {
                let a = a.eval_generic::<S>(u)?;
                let b = b.eval_generic::<S>(u)?;
                match op {
                    BinaryOp::Div if b.val() == 0.0 => return Err(DomainError("division by zero".into())),
                    BinaryOp::Pow if a.val() == 0.0 && b.val() < 0.0 => {
                        return Err(DomainError("zero raised to a negative power".into()))
                    }
                    BinaryOp::Pow if a.val() < 0.0 && b.val().fract() != 0.0 => {
                        return Err(DomainError("negative base with fractional exponent".into()))
                    }
                    _ => {}
                }
                S::combine(*op, a, b)
            }
        };
        if out.val().is_finite() {
            Ok(out)
        } else {
            Err(DomainError(format!("non-finite intermediate value in {self}")))
        }
    }

    pub fn eval(&self, u: &Vector) -> Result<f64, DomainError> {
        self.eval_generic(u)
    }

    /// Value of the expression when it contains no variables.
    pub fn const_value(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            Expr::Var(_) => None,
            Expr::Unary(op, a) => Some(f64::apply(*op, a.const_value()?)),
            Expr::Binary(op, a, b) => Some(f64::combine(*op, a.const_value()?, b.const_value()?)),
        }
    }

    /// `true` when the expression is affine in the variables.
    pub fn is_affine(&self) -> bool {
        self.degree().is_some()
    }

    /// Some(0) for constants, Some(1) for affine, None otherwise.
    fn degree(&self) -> Option<u8> {
        match self {
            Expr::Const(_) => Some(0),
            Expr::Var(_) => Some(1),
            Expr::Unary(UnaryOp::Neg, a) => a.degree(),
            Expr::Unary(_, a) => (a.degree()? == 0).then_some(0),
            Expr::Binary(op, a, b) => {
                let (da, db) = (a.degree()?, b.degree()?);
                match op {
                    BinaryOp::Add | BinaryOp::Sub => Some(da.max(db)),
                    BinaryOp::Mul => (da + db <= 1).then_some(da + db),
                    BinaryOp::Div => (db == 0).then_some(da),
                    BinaryOp::Pow => match (da, b.const_value()) {
                        (0, _) | (_, Some(0.0)) => Some(0),
                        (1, Some(1.0)) => Some(1),
                        _ => None,
                    },
                }
            }
        }
    }

    /// Largest variable index used plus one.
    pub fn arity(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(k) => k + 1,
            Expr::Unary(_, a) => a.arity(),
            Expr::Binary(_, a, b) => a.arity().max(b.arity()),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(k) => write!(f, "x{}", k + 1),
            Expr::Unary(UnaryOp::Neg, a) => write!(f, "(-{a})"),
            Expr::Unary(UnaryOp::Sin, a) => write!(f, "sin({a})"),
            Expr::Unary(UnaryOp::Cos, a) => write!(f, "cos({a})"),
            Expr::Unary(UnaryOp::Exp, a) => write!(f, "exp({a})"),
            Expr::Binary(op, a, b) => {
                let sym = match op {
                    BinaryOp::Add => "+",
                    BinaryOp::Sub => "-",
                    BinaryOp::Mul => "*",
                    BinaryOp::Div => "/",
                    BinaryOp::Pow => "^",
                };
                write!(f, "({a} {sym} {b})")
            }
        }
    }
}

/// Value and exact gradient of `ast` at `u` by forward-mode differentiation.
pub fn ad_gradient(ast: &Expr, u: &Vector) -> Result<(f64, Vector), DomainError> {
    let d: DualNumber = ast.eval_generic(u)?;
    Ok((d.value, d.derivative))
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    dim: usize,
    line: usize,
}

/// Parses `text` as an expression over `x1..x{dim}`.
///
/// `line` and `col_offset` position error messages inside a larger file.
pub fn parse_expr(text: &str, dim: usize, line: usize, col_offset: usize) -> Result<Expr, ParseError> {
    let toks = tokenize(text, line, col_offset)?;
    let mut p = Parser { toks, pos: 0, dim, line };
    let e = p.expr()?;
    match p.peek() {
        Tok::End => Ok(e),
        t => Err(p.error_here(format!("unexpected {}", describe(t)))),
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(n) => format!("number {n}"),
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Sym(c) => format!("'{c}'"),
        Tok::End => "end of expression".into(),
    }
}

fn tokenize(text: &str, line: usize, col_offset: usize) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = col_offset + i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s: String = chars[start..i].iter().collect();
            let n = s.parse::<f64>().map_err(|_| ParseError { line, column: col, message: format!("malformed number '{s}'") })?;
            out.push((Tok::Num(n), col));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Sym(c), col));
            i += 1;
        } else {
            return Err(ParseError { line, column: col, message: format!("unexpected character '{c}'") });
        }
    }
    out.push((Tok::End, col_offset + chars.len() + 1));
    Ok(out)
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn column(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, message: String) -> ParseError {
        ParseError { line: self.line, column: self.column(), message }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.error_here(format!("expected '{c}', found {}", describe(self.peek()))))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Sym('+') => BinaryOp::Add,
                Tok::Sym('-') => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Sym('*') => BinaryOp::Mul,
                Tok::Sym('/') => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Tok::Sym('-') => {
                self.bump();
                Ok(Expr::Unary(UnaryOp::Neg, Box::new(self.unary()?)))
            }
            Tok::Sym('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if *self.peek() != Tok::Sym('^') {
            return Ok(base);
        }
        self.bump();
        let col = self.column();
        let exponent = self.unary()?;
        let Some(p) = exponent.const_value() else {
            return Err(ParseError { line: self.line, column: col, message: "exponent must be a constant".into() });
        };
        Ok(Expr::Binary(BinaryOp::Pow, Box::new(base), Box::new(Expr::Const(p))))
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let col = self.column();
        match self.bump() {
            Tok::Num(n) => Ok(Expr::Const(n)),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let func = match name.as_str() {
                    "pi" => return Ok(Expr::Const(std::f64::consts::PI)),
                    "e" => return Ok(Expr::Const(std::f64::consts::E)),
                    "sin" => UnaryOp::Sin,
                    "cos" => UnaryOp::Cos,
                    "exp" => UnaryOp::Exp,
                    _ => return self.variable(&name, col),
                };
                self.expect('(')?;
                let arg = self.expr()?;
                self.expect(')')?;
                Ok(Expr::Unary(func, Box::new(arg)))
            }
            t => {
                Err(ParseError { line: self.line, column: col, message: format!("expected an operand, found {}", describe(&t)) })
            }
        }
    }

    fn variable(&self, name: &str, col: usize) -> Result<Expr, ParseError> {
        let index = name.strip_prefix('x').and_then(|k| k.parse::<usize>().ok()).filter(|&k| k >= 1);
        match index {
            Some(k) if k <= self.dim => Ok(Expr::Var(k - 1)),
            Some(k) => Err(ParseError {
                line: self.line,
                column: col,
                message: format!("undeclared variable x{k} (dimension is {})", self.dim),
            }),
            None => Err(ParseError { line: self.line, column: col, message: format!("unknown identifier '{name}'") }),
        }
    }
}
