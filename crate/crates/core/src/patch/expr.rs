//! Scalar expressions over coordinates `x1..x_n`: parsing, printing,
//! evaluation and exact partial derivatives.
//!
//! Grammar (usual precedence, `^` binds tightest and takes an integer):
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' '-'? digits)?
//! atom  := number | 'x' digits | ('sin' | 'cos' | 'exp') '(' expr ')' | '(' expr ')'
//! ```

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    /// 0-based coordinate index; printed as `x{i+1}`.
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
}

use Expr::*;

// Simplifying constructors. They fold constants and drop neutral elements.
#[allow(clippy::should_implement_trait, clippy::redundant_guards)]
impl Expr {
    pub fn num(x: f64) -> Expr {
        Num(x)
    }

    pub fn var(i: usize) -> Expr {
        Var(i)
    }

    fn as_num(&self) -> Option<f64> {
        match self {
            Num(x) => Some(*x),
            _ => None,
        }
    }

    fn is(&self, v: f64) -> bool {
        self.as_num() == Some(v)
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        match (a.as_num(), b.as_num()) {
            (Some(x), Some(y)) => Num(x + y),
            (Some(x), _) if x == 0.0 => b,
            (_, Some(y)) if y == 0.0 => a,
            _ => Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (a.as_num(), b.as_num()) {
            (Some(x), Some(y)) => Num(x - y),
            (_, Some(y)) if y == 0.0 => a,
            (Some(x), _) if x == 0.0 => Expr::neg(b),
            _ => Sub(Box::new(a), Box::new(b)),
        }
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        if a.is(0.0) || b.is(0.0) {
            return Num(0.0);
        }
        match (a, b) {
            (Num(x), Num(y)) => Num(x * y),
            (Num(x), b) if x == 1.0 => b,
            (a, Num(y)) if y == 1.0 => a,
            (Num(x), Mul(inner, rest)) if inner.as_num().is_some() => {
                Expr::mul(Num(x * inner.as_num().unwrap_or(1.0)), *rest)
            }
            (a, b) => Mul(Box::new(a), Box::new(b)),
        }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        match (a.as_num(), b.as_num()) {
            (Some(x), _) if x == 0.0 => Num(0.0),
            (_, Some(y)) if y == 1.0 => a,
            (Some(x), Some(y)) if y != 0.0 => Num(x / y),
            _ => Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn neg(a: Expr) -> Expr {
        match a {
            Num(x) => Num(-x),
            Neg(inner) => *inner,
            a => Neg(Box::new(a)),
        }
    }

    pub fn pow(a: Expr, n: i32) -> Expr {
        match (n, a.as_num()) {
            (0, _) => Num(1.0),
            (1, _) => a,
            (_, Some(x)) if x.powi(n).is_finite() => Num(x.powi(n)),
            _ => Pow(Box::new(a), n),
        }
    }

    pub fn sin(a: Expr) -> Expr {
        match a.as_num() {
            Some(x) => Num(x.sin()),
            None => Sin(Box::new(a)),
        }
    }

    pub fn cos(a: Expr) -> Expr {
        match a.as_num() {
            Some(x) => Num(x.cos()),
            None => Cos(Box::new(a)),
        }
    }

    pub fn exp(a: Expr) -> Expr {
        match a.as_num() {
            Some(x) => Num(x.exp()),
            None => Exp(Box::new(a)),
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Num(_) => true,
            Var(_) => false,
            Neg(a) | Pow(a, _) | Sin(a) | Cos(a) | Exp(a) => a.is_constant(),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => a.is_constant() && b.is_constant(),
        }
    }

    /// Largest variable index used (0-based), if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Num(_) => None,
            Var(i) => Some(*i),
            Neg(a) | Pow(a, _) | Sin(a) | Cos(a) | Exp(a) => a.max_var(),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => a.max_var().max(b.max_var()),
        }
    }

    /// Evaluate at a point. Division by zero and non-finite results are errors.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let v = match self {
            Num(v) => *v,
            Var(i) => *x.get(*i).ok_or_else(|| {
                Error::validation(format!("variable x{} not supplied (point has {})", i + 1, x.len()))
            })?,
            Neg(a) => -a.eval(x)?,
            Add(a, b) => a.eval(x)? + b.eval(x)?,
            Sub(a, b) => a.eval(x)? - b.eval(x)?,
            Mul(a, b) => a.eval(x)? * b.eval(x)?,
            Div(a, b) => {
                let d = b.eval(x)?;
                if d == 0.0 {
                    return Err(Error::numerical(format!("division by zero in {self}")));
                }
                a.eval(x)? / d
            }
            Pow(a, n) => a.eval(x)?.powi(*n),
            Sin(a) => a.eval(x)?.sin(),
            Cos(a) => a.eval(x)?.cos(),
            Exp(a) => a.eval(x)?.exp(),
        };
        if !v.is_finite() {
            return Err(Error::numerical(format!("non-finite value of {self}")));
        }
        Ok(v)
    }

    fn precedence(&self) -> u8 {
        match self {
            Add(..) | Sub(..) => 1,
            Mul(..) | Div(..) => 2,
            Neg(_) => 3,
            Pow(..) => 4,
            _ => 5,
        }
    }
}

/// Exact partial derivative `∂e/∂x_{i+1}` (0-based `i`), constant-folded.
pub fn diff_expr(e: &Expr, i: usize) -> Expr {
    match e {
        Num(_) => Num(0.0),
        Var(j) => Num(if *j == i { 1.0 } else { 0.0 }),
        Neg(a) => Expr::neg(diff_expr(a, i)),
        Add(a, b) => Expr::add(diff_expr(a, i), diff_expr(b, i)),
        Sub(a, b) => Expr::sub(diff_expr(a, i), diff_expr(b, i)),
        Mul(a, b) => Expr::add(
            Expr::mul(diff_expr(a, i), (**b).clone()),
            Expr::mul((**a).clone(), diff_expr(b, i)),
        ),
        Div(a, b) => Expr::div(
            Expr::sub(
                Expr::mul(diff_expr(a, i), (**b).clone()),
                Expr::mul((**a).clone(), diff_expr(b, i)),
            ),
            Expr::pow((**b).clone(), 2),
        ),
        Pow(a, n) => Expr::mul(
            Expr::mul(Num(f64::from(*n)), Expr::pow((**a).clone(), n - 1)),
            diff_expr(a, i),
        ),
        Sin(a) => Expr::mul(Expr::cos((**a).clone()), diff_expr(a, i)),
        Cos(a) => Expr::mul(Expr::neg(Expr::sin((**a).clone())), diff_expr(a, i)),
        Exp(a) => Expr::mul(Expr::exp((**a).clone()), diff_expr(a, i)),
    }
}

fn write_num(f: &mut fmt::Formatter<'_>, x: f64) -> fmt::Result {
    let body = if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x.abs() as i64)
    } else {
        format!("{:?}", x.abs())
    };
    if x.is_sign_negative() {
        write!(f, "(-{body})")
    } else {
        f.write_str(&body)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let child = |f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool| {
            if parens {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        let binary = |f: &mut fmt::Formatter<'_>, a: &Expr, op: &str, b: &Expr| {
            let p = self.precedence();
            child(f, a, a.precedence() < p)?;
            f.write_str(op)?;
            child(f, b, b.precedence() <= p)
        };
        match self {
            Num(x) => write_num(f, *x),
            Var(i) => write!(f, "x{}", i + 1),
            Neg(a) => {
                f.write_str("-")?;
                child(f, a, a.precedence() < 3)
            }
            Add(a, b) => binary(f, a, " + ", b),
            Sub(a, b) => binary(f, a, " - ", b),
            Mul(a, b) => binary(f, a, "*", b),
            Div(a, b) => binary(f, a, "/", b),
            Pow(a, n) => {
                child(f, a, a.precedence() < 5)?;
                write!(f, "^{n}")
            }
            Sin(a) => write!(f, "sin({a})"),
            Cos(a) => write!(f, "cos({a})"),
            Exp(a) => write!(f, "exp({a})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    End,
}

struct Lexer;

impl Lexer {
    /// Tokens paired with their 1-based character position.
    fn run(text: &str) -> Result<Vec<(Tok, usize)>> {
        let chars: Vec<char> = text.chars().collect();
        let mut out = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let pos = i + 1;
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() || c == '.' {
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
                        while j < chars.len() && chars[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let s: String = chars[start..i].iter().collect();
                let v: f64 = s.parse().map_err(|_| Error::Syntax {
                    pos,
                    msg: format!("malformed number '{s}'"),
                })?;
                out.push((Tok::Num(v), pos));
            } else if c.is_ascii_alphabetic() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
            } else if "+-*/^()".contains(c) {
                out.push((Tok::Op(c), pos));
                i += 1;
            } else {
                return Err(Error::Syntax { pos, msg: format!("unexpected character '{c}'") });
            }
        }
        out.push((Tok::End, chars.len() + 1));
        Ok(out)
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    max_vars: Option<usize>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if *self.peek() == Tok::Op(c) {
            self.bump();
            Ok(())
        } else {
            self.fail(format!("expected '{c}'"))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    lhs = Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Op('-') => {
                    self.bump();
                    lhs = Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    lhs = Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Op('/') => {
                    self.bump();
                    lhs = Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Op('-') {
            self.bump();
            return Ok(Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if *self.peek() != Tok::Op('^') {
            return Ok(base);
        }
        self.bump();
        let negative = if *self.peek() == Tok::Op('-') {
            self.bump();
            true
        } else {
            false
        };
        match self.peek().clone() {
            Tok::Num(v) if v.fract() == 0.0 && v.abs() <= f64::from(i32::MAX) => {
                self.bump();
                let n = v as i32;
                Ok(Pow(Box::new(base), if negative { -n } else { n }))
            }
            _ => self.fail("exponent must be an integer literal"),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(v) => Ok(Num(v)),
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(digits) = name.strip_prefix('x') {
                    if !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit()) {
                        let idx: usize = digits.parse().unwrap_or(0);
                        let in_range = idx >= 1 && self.max_vars.is_none_or(|m| idx <= m);
                        if !in_range {
                            return Err(Error::Syntax {
                                pos,
                                msg: format!("variable index out of range: {name}"),
                            });
                        }
                        return Ok(Var(idx - 1));
                    }
                }
                let f: fn(Box<Expr>) -> Expr = match name.as_str() {
                    "sin" => Sin,
                    "cos" => Cos,
                    "exp" => Exp,
                    _ => {
                        return Err(Error::Syntax { pos, msg: format!("unknown identifier '{name}'") })
                    }
                };
                self.expect('(')?;
                let arg = self.expr()?;
                self.expect(')')?;
                Ok(f(Box::new(arg)))
            }
            Tok::End => Err(Error::Syntax { pos, msg: "unexpected end of input".into() }),
            Tok::Op(c) => Err(Error::Syntax { pos, msg: format!("unexpected '{c}'") }),
        }
    }
}

/// Parse an expression with any variable index `x1, x2, …`.
pub fn parse_expr(text: &str) -> Result<Expr> {
    parse_expr_in(text, None)
}

/// Parse an expression whose variables must lie in `x1..x_{max_vars}`.
pub fn parse_expr_in(text: &str, max_vars: Option<usize>) -> Result<Expr> {
    let toks = Lexer::run(text)?;
    let mut p = Parser { toks, at: 0, max_vars };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.fail("unexpected trailing input");
    }
    Ok(e)
}
