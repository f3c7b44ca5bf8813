//! Arithmetic expressions over `x`, `n1..n4`, `s` and the constants `pi`, `e`.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?
//! atom    := number | name | name '(' sum (',' sum)* ')' | '(' sum ')'
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-x^2` is
//! `-(x^2)` and `2^-3` is `2^(-3)`.

use std::collections::BTreeSet;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("unexpected character {ch:?} at offset {pos}")]
    UnexpectedChar { ch: char, pos: usize },
    #[error("unexpected {found} at offset {pos}")]
    UnexpectedToken { found: String, pos: usize },
    #[error("unknown name {0:?}")]
    UnknownName(String),
    #[error("{name} takes {expected} argument(s), got {got}")]
    Arity { name: String, expected: usize, got: usize },
    #[error("number {0:?} is not finite")]
    BadNumber(String),
    #[error("variable {0} is not available here")]
    VariableNotAllowed(Var),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} outside its domain")]
    Domain(Func),
    #[error("non-finite intermediate value")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Var {
    X,
    N(u8),
    S,
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X => f.write_str("x"),
            Var::N(i) => write!(f, "n{i}"),
            Var::S => f.write_str("s"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Abs,
    Sqrt,
    Frac,
    Pow,
}

impl Func {
    const ALL: [Func; 8] = [
        Func::Sin,
        Func::Cos,
        Func::Exp,
        Func::Log,
        Func::Abs,
        Func::Sqrt,
        Func::Frac,
        Func::Pow,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
            Func::Frac => "frac",
            Func::Pow => "pow",
        }
    }

    fn arity(self) -> usize {
        if self == Func::Pow {
            2
        } else {
            1
        }
    }
}

impl fmt::Display for Func {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

const PREC_UNARY: u8 = 3;
const PREC_ATOM: u8 = 5;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Pi,
    E,
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr, ParseError> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.sum()?;
        match p.peek() {
            Tok::End => Ok(e),
            _ => Err(p.unexpected()),
        }
    }

    /// Parses and rejects any variable outside `allowed`.
    pub fn parse_with(src: &str, allowed: &[Var]) -> Result<Expr, ParseError> {
        let e = Self::parse(src)?;
        if let Some(v) = e.variables().into_iter().find(|v| !allowed.contains(v)) {
            return Err(ParseError::VariableNotAllowed(v));
        }
        Ok(e)
    }

    pub fn variables(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Expr::Var(v) => {
                out.insert(*v);
            }
            Expr::Neg(a) => a.collect_vars(out),
            Expr::Bin(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Call(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            Expr::Num(_) | Expr::Pi | Expr::E => {}
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Neg(_) => PREC_UNARY,
            Expr::Bin(op, ..) => op.precedence(),
            _ => PREC_ATOM,
        }
    }

    /// Real evaluation at `x`, with `n1..n4` and `s` also available.
    pub fn eval_real(&self, vars: &Vars<f64>) -> Result<f64, EvalError> {
        self.eval(vars)
    }

    pub fn eval_complex(&self, vars: &Vars<Complex64>) -> Result<Complex64, EvalError> {
        self.eval(vars)
    }

    fn eval<T: Scalar>(&self, vars: &Vars<T>) -> Result<T, EvalError> {
        let v = match self {
            Expr::Num(v) => T::real(*v),
            Expr::Pi => T::real(std::f64::consts::PI),
            Expr::E => T::real(std::f64::consts::E),
            Expr::Var(Var::X) => vars.x,
            Expr::Var(Var::N(i)) => vars.n[(*i - 1) as usize],
            Expr::Var(Var::S) => vars.s,
            Expr::Neg(a) => -a.eval(vars)?,
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(vars)?, b.eval(vars)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b.is_zero() {
                            return Err(EvalError::DivisionByZero);
                        }
                        a / b
                    }
                    BinOp::Pow => T::pow(a, b).ok_or(EvalError::Domain(Func::Pow))?,
                }
            }
            Expr::Call(func, args) => {
                let a = args[0].eval(vars)?;
                let r = match func {
                    Func::Sin => Some(a.sin()),
                    Func::Cos => Some(a.cos()),
                    Func::Exp => Some(a.exp()),
                    Func::Log => a.log(),
                    Func::Abs => Some(a.abs()),
                    Func::Sqrt => a.sqrt(),
                    Func::Frac => a.frac(),
                    Func::Pow => T::pow(a, args[1].eval(vars)?),
                };
                r.ok_or(EvalError::Domain(*func))?
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite)
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Pi => f.write_str("pi"),
            Expr::E => f.write_str("e"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_child(f, a, a.precedence() < PREC_UNARY)
            }
            Expr::Bin(op, a, b) => {
                let p = op.precedence();
                // Left-associative operators keep a same-level right child in
                // parentheses; `^` is the mirror image.
                let (left_paren, right_paren) = if *op == BinOp::Pow {
                    (a.precedence() <= p, b.precedence() < PREC_UNARY)
                } else {
                    (a.precedence() < p, b.precedence() <= p)
                };
                write_child(f, a, left_paren)?;
                if *op == BinOp::Pow {
                    f.write_str("^")?;
                } else {
                    write!(f, " {} ", op.symbol())?;
                }
                write_child(f, b, right_paren)
            }
            Expr::Call(func, args) => {
                write!(f, "{func}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, paren: bool) -> fmt::Result {
    if paren {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Variable bindings for evaluation.
#[derive(Debug, Clone, Copy)]
pub struct Vars<T> {
    pub x: T,
    pub n: [T; 4],
    pub s: T,
}

impl<T: Scalar> Vars<T> {
    pub fn at_x(x: f64) -> Self {
        Self {
            x: T::real(x),
            n: [T::real(0.0); 4],
            s: T::real(0.0),
        }
    }
}

impl Vars<Complex64> {
    pub fn lattice(n: &[u64], s: Complex64) -> Self {
        let mut v = Self::at_x(0.0);
        for (slot, &k) in v.n.iter_mut().zip(n) {
            *slot = Complex64::new(k as f64, 0.0);
        }
        v.s = s;
        v
    }
}

/// Number type the evaluator runs over.
pub trait Scalar:
    Copy + std::ops::Add<Output = Self> + std::ops::Sub<Output = Self> + std::ops::Mul<Output = Self> + std::ops::Div<Output = Self> + std::ops::Neg<Output = Self>
{
    fn real(v: f64) -> Self;
    fn is_zero(self) -> bool;
    fn is_finite(self) -> bool;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn abs(self) -> Self;
    fn log(self) -> Option<Self>;
    fn sqrt(self) -> Option<Self>;
    fn frac(self) -> Option<Self>;
    fn pow(base: Self, exponent: Self) -> Option<Self>;
}

impl Scalar for f64 {
    fn real(v: f64) -> Self {
        v
    }
    fn is_zero(self) -> bool {
        self == 0.0
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn log(self) -> Option<Self> {
        (self > 0.0).then(|| self.ln())
    }
    fn sqrt(self) -> Option<Self> {
        (self >= 0.0).then(|| f64::sqrt(self))
    }
    fn frac(self) -> Option<Self> {
        let r = self - self.floor();
        Some(if r >= 1.0 { 0.0 } else { r })
    }
    fn pow(base: Self, exponent: Self) -> Option<Self> {
        let r = if exponent.fract() == 0.0 && exponent.abs() <= i32::MAX as f64 {
            base.powi(exponent as i32)
        } else {
            base.powf(exponent)
        };
        (!r.is_nan()).then_some(r)
    }
}

impl Scalar for Complex64 {
    fn real(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }
    fn is_zero(self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn is_finite(self) -> bool {
        Complex64::is_finite(self)
    }
    fn sin(self) -> Self {
        Complex64::sin(self)
    }
    fn cos(self) -> Self {
        Complex64::cos(self)
    }
    fn exp(self) -> Self {
        Complex64::exp(self)
    }
    fn abs(self) -> Self {
        Complex64::new(self.norm(), 0.0)
    }
    fn log(self) -> Option<Self> {
        (!self.is_zero()).then(|| self.ln())
    }
    fn sqrt(self) -> Option<Self> {
        Some(Complex64::sqrt(self))
    }
    fn frac(self) -> Option<Self> {
        (self.im == 0.0).then(|| Complex64::new(self.re.frac().unwrap_or(0.0), 0.0))
    }
    fn pow(base: Self, exponent: Self) -> Option<Self> {
        if exponent.im == 0.0 && exponent.re.fract() == 0.0 && exponent.re.abs() <= i32::MAX as f64 {
            return Some(base.powi(exponent.re as i32));
        }
        if base.is_zero() {
            return (exponent.re > 0.0).then(|| Complex64::new(0.0, 0.0));
        }
        Some(base.powc(exponent))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64, String),
    Name(String),
    Sym(char),
    End,
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_digit() || chars[i].1 == '.') {
                i += 1;
            }
            // Exponent only when digits follow, so `2e` is not swallowed.
            if i < chars.len() && matches!(chars[i].1, 'e' | 'E') {
                let mut j = i + 1;
                if j < chars.len() && matches!(chars[j].1, '+' | '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].1.is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].1.is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().map(|&(_, c)| c).collect();
            let v: f64 = text.parse().map_err(|_| ParseError::BadNumber(text.clone()))?;
            if !v.is_finite() {
                return Err(ParseError::BadNumber(text));
            }
            out.push((Tok::Num(v, text), pos));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((Tok::Name(chars[start..i].iter().map(|&(_, c)| c).collect()), pos));
        } else if "+-*/^(),".contains(c) {
            out.push((Tok::Sym(c), pos));
            i += 1;
        } else {
            return Err(ParseError::UnexpectedChar { ch: c, pos });
        }
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self) -> ParseError {
        let (tok, pos) = &self.tokens[self.pos];
        let found = match tok {
            Tok::Num(_, text) => format!("number {text}"),
            Tok::Name(n) => format!("name {n:?}"),
            Tok::Sym(c) => format!("{c:?}"),
            Tok::End => "end of input".to_string(),
        };
        ParseError::UnexpectedToken { found, pos: *pos }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected())
        }
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Tok::Sym('+') => BinOp::Add,
                Tok::Sym('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.product()?));
        }
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Sym('*') => BinOp::Mul,
                Tok::Sym('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Sym('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() == Tok::Sym('^') {
            self.bump();
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Num(v, _) => {
                self.bump();
                Ok(Expr::Num(v))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.sum()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Name(name) => {
                self.bump();
                if *self.peek() == Tok::Sym('(') {
                    let func = Func::ALL
                        .into_iter()
                        .find(|f| f.name() == name)
                        .ok_or_else(|| ParseError::UnknownName(name.clone()))?;
                    self.bump();
                    let mut args = vec![self.sum()?];
                    while *self.peek() == Tok::Sym(',') {
                        self.bump();
                        args.push(self.sum()?);
                    }
                    self.expect(')')?;
                    if args.len() != func.arity() {
                        return Err(ParseError::Arity {
                            name,
                            expected: func.arity(),
                            got: args.len(),
                        });
                    }
                    return Ok(Expr::Call(func, args));
                }
                match name.as_str() {
                    "x" => Ok(Expr::Var(Var::X)),
                    "s" => Ok(Expr::Var(Var::S)),
                    "pi" => Ok(Expr::Pi),
                    "e" => Ok(Expr::E),
                    "n1" | "n2" | "n3" | "n4" => Ok(Expr::Var(Var::N(name.as_bytes()[1] - b'0'))),
                    _ => Err(ParseError::UnknownName(name)),
                }
            }
            _ => Err(self.unexpected()),
        }
    }
}
