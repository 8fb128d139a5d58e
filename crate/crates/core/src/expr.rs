//! Expression trees for metric components.
//!
//! A small closed grammar (+, -, *, /, integer powers, exp) over the four
//! chart variables `x1..x4`. Differentiation is symbolic, so charts built
//! from expressions get exact first and second partials.

use crate::error::{Error, Result};
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone)]
pub enum Expr {
    Const(f64),
    /// Chart variable, index 0..3.
    Var(usize),
    Add(Arc<Expr>, Arc<Expr>),
    Sub(Arc<Expr>, Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
    Div(Arc<Expr>, Arc<Expr>),
    Neg(Arc<Expr>),
    /// Integer power; negative exponents are allowed away from zeros.
    PowI(Arc<Expr>, i32),
    Exp(Arc<Expr>),
}

impl Expr {
    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    pub fn var(i: usize) -> Expr {
        assert!(i < 4, "chart variables are x1..x4");
        Expr::Var(i)
    }

    pub fn eval(&self, x: &[f64; 4]) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Var(i) => x[*i],
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Div(a, b) => a.eval(x) / b.eval(x),
            Expr::Neg(a) => -a.eval(x),
            Expr::PowI(a, n) => a.eval(x).powi(*n),
            Expr::Exp(a) => a.eval(x).exp(),
        }
    }

    /// Symbolic partial derivative with respect to `x_axis`.
    pub fn diff(&self, axis: usize) -> Expr {
        use Expr::*;
        match self {
            Const(_) => Const(0.0),
            Var(i) => Const(if *i == axis { 1.0 } else { 0.0 }),
            Add(a, b) => simplify_add(a.diff(axis), b.diff(axis)),
            Sub(a, b) => simplify_sub(a.diff(axis), b.diff(axis)),
            Mul(a, b) => simplify_add(
                simplify_mul(a.diff(axis), (**b).clone()),
                simplify_mul((**a).clone(), b.diff(axis)),
            ),
            Div(a, b) => {
                // (a/b)' = a'/b - a b'/b^2
                let da = a.diff(axis);
                let db = b.diff(axis);
                simplify_sub(
                    simplify_div(da, (**b).clone()),
                    simplify_div(
                        simplify_mul((**a).clone(), db),
                        PowI(Arc::new((**b).clone()), 2),
                    ),
                )
            }
            Neg(a) => simplify_neg(a.diff(axis)),
            PowI(a, n) => {
                if *n == 0 {
                    return Const(0.0);
                }
                let da = a.diff(axis);
                simplify_mul(
                    simplify_mul(Const(f64::from(*n)), PowI(Arc::new((**a).clone()), n - 1)),
                    da,
                )
            }
            Exp(a) => simplify_mul(Exp(a.clone()), a.diff(axis)),
        }
    }

    fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if *c == 0.0)
    }

    fn is_one(&self) -> bool {
        matches!(self, Expr::Const(c) if *c == 1.0)
    }
}

fn simplify_add(a: Expr, b: Expr) -> Expr {
    if a.is_zero() {
        return b;
    }
    if b.is_zero() {
        return a;
    }
    if let (Expr::Const(x), Expr::Const(y)) = (&a, &b) {
        return Expr::Const(x + y);
    }
    Expr::Add(Arc::new(a), Arc::new(b))
}

fn simplify_sub(a: Expr, b: Expr) -> Expr {
    if b.is_zero() {
        return a;
    }
    if a.is_zero() {
        return simplify_neg(b);
    }
    if let (Expr::Const(x), Expr::Const(y)) = (&a, &b) {
        return Expr::Const(x - y);
    }
    Expr::Sub(Arc::new(a), Arc::new(b))
}

fn simplify_mul(a: Expr, b: Expr) -> Expr {
    if a.is_zero() || b.is_zero() {
        return Expr::Const(0.0);
    }
    if a.is_one() {
        return b;
    }
    if b.is_one() {
        return a;
    }
    if let (Expr::Const(x), Expr::Const(y)) = (&a, &b) {
        return Expr::Const(x * y);
    }
    Expr::Mul(Arc::new(a), Arc::new(b))
}

fn simplify_div(a: Expr, b: Expr) -> Expr {
    if a.is_zero() {
        return Expr::Const(0.0);
    }
    if b.is_one() {
        return a;
    }
    Expr::Div(Arc::new(a), Arc::new(b))
}

fn simplify_neg(a: Expr) -> Expr {
    if let Expr::Const(x) = &a {
        return Expr::Const(-x);
    }
    Expr::Neg(Arc::new(a))
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::PowI(a, n) => write!(f, "({a}^{n})"),
            Expr::Exp(a) => write!(f, "exp({a})"),
        }
    }
}

// Operator sugar used by the built-in chart constructors.
impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        simplify_add(self, rhs)
    }
}
impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        simplify_sub(self, rhs)
    }
}
impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        simplify_mul(self, rhs)
    }
}
impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        simplify_div(self, rhs)
    }
}
impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        simplify_neg(self)
    }
}

impl Expr {
    pub fn powi(self, n: i32) -> Expr {
        Expr::PowI(Arc::new(self), n)
    }

    pub fn exp_of(self) -> Expr {
        Expr::Exp(Arc::new(self))
    }
}

/// Parse an expression in the chart grammar.
///
/// Grammar: numbers, `x1..x4`, `+ - * /`, `^` with an integer exponent,
/// `exp(...)`, parentheses, unary minus.
pub fn parse(input: &str) -> Result<Expr> {
    let mut p = Parser {
        chars: input.chars().collect(),
        pos: 0,
        src: input,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.chars.len() {
        return Err(Error::ExprParse(format!(
            "trailing input at byte {} in '{}'",
            p.pos, p.src
        )));
    }
    Ok(e)
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    src: &'a str,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some('+') => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = lhs + rhs;
                }
                Some('-') => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = lhs - rhs;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.bump();
                    let rhs = self.factor()?;
                    lhs = lhs * rhs;
                }
                Some('/') => {
                    self.bump();
                    let rhs = self.factor()?;
                    lhs = lhs / rhs;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.bump();
            let mut sign = 1i32;
            if self.peek() == Some('-') {
                self.bump();
                sign = -1;
            }
            let mut digits = String::new();
            while let Some(c) = self.chars.get(self.pos).copied() {
                if c.is_ascii_digit() {
                    digits.push(c);
                    self.pos += 1;
                } else {
                    break;
                }
            }
            if digits.is_empty() {
                return Err(Error::ExprParse(format!(
                    "expected integer exponent in '{}'",
                    self.src
                )));
            }
            let n: i32 = digits
                .parse()
                .map_err(|_| Error::ExprParse(format!("bad exponent in '{}'", self.src)))?;
            return Ok(base.powi(sign * n));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some('(') => {
                self.bump();
                let e = self.expr()?;
                if self.bump() != Some(')') {
                    return Err(Error::ExprParse(format!("missing ')' in '{}'", self.src)));
                }
                Ok(e)
            }
            Some('-') => {
                self.bump();
                Ok(-self.atom()?)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_alphabetic() => self.ident(),
            other => Err(Error::ExprParse(format!(
                "unexpected {:?} in '{}'",
                other, self.src
            ))),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.chars.get(self.pos).copied() {
            if c.is_ascii_digit() || c == '.' {
                self.pos += 1;
            } else if (c == 'e' || c == 'E') && self.pos > start {
                self.pos += 1;
                if matches!(self.chars.get(self.pos), Some('+') | Some('-')) {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse::<f64>()
            .map(Expr::Const)
            .map_err(|_| Error::ExprParse(format!("bad number '{text}' in '{}'", self.src)))
    }

    fn ident(&mut self) -> Result<Expr> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.chars.get(self.pos).copied() {
            if c.is_alphanumeric() || c == '_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        let name: String = self.chars[start..self.pos].iter().collect();
        match name.as_str() {
            "x1" => Ok(Expr::Var(0)),
            "x2" => Ok(Expr::Var(1)),
            "x3" => Ok(Expr::Var(2)),
            "x4" => Ok(Expr::Var(3)),
            "exp" => {
                if self.bump() != Some('(') {
                    return Err(Error::ExprParse(format!(
                        "expected '(' after exp in '{}'",
                        self.src
                    )));
                }
                let e = self.expr()?;
                if self.bump() != Some(')') {
                    return Err(Error::ExprParse(format!("missing ')' in '{}'", self.src)));
                }
                Ok(e.exp_of())
            }
            _ => Err(Error::ExprParse(format!(
                "unknown identifier '{name}' in '{}'",
                self.src
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fd_diff(e: &Expr, x: &[f64; 4], axis: usize) -> f64 {
        let h = 1e-6;
        let mut xp = *x;
        let mut xm = *x;
        xp[axis] += h;
        xm[axis] -= h;
        (e.eval(&xp) - e.eval(&xm)) / (2.0 * h)
    }

    #[test]
    fn parses_and_evaluates_rational_expression() {
        let e = parse("4 / (1 + x1^2 + x2^2)^2").unwrap();
        let x = [0.3, -0.2, 0.0, 0.0];
        let n = 1.0 + 0.09 + 0.04;
        assert_relative_eq!(e.eval(&x), 4.0 / (n * n), max_relative = 1e-14);
    }

    #[test]
    fn parses_exp_and_unary_minus() {
        let e = parse("exp(-x3 * x4) - 1").unwrap();
        let x = [0.0, 0.0, 0.5, 0.25];
        assert_relative_eq!(e.eval(&x), (-0.125f64).exp() - 1.0, max_relative = 1e-14);
    }

    #[test]
    fn symbolic_derivative_matches_finite_differences() {
        let exprs = [
            "4 / (1 + x1^2 + x2^2 + x3^2 + x4^2)^2",
            "exp(2 * (x1 + x2 * x3)) * (1 - x4^3)",
            "(x1 * x2 - x3 / (2 + x4^2))^2",
        ];
        let x = [0.17, -0.4, 0.26, 0.35];
        for s in exprs {
            let e = parse(s).unwrap();
            for axis in 0..4 {
                let sym = e.diff(axis).eval(&x);
                let fd = fd_diff(&e, &x, axis);
                assert_relative_eq!(sym, fd, epsilon = 1e-7, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn second_derivatives_are_exact_for_polynomials() {
        let e = parse("x1^2 * x2 + 3 * x3^4").unwrap();
        let d11 = e.diff(0).diff(0);
        let x = [1.5, -2.0, 0.5, 0.0];
        assert_relative_eq!(d11.eval(&x), 2.0 * -2.0, max_relative = 1e-14);
        let d33 = e.diff(2).diff(2);
        assert_relative_eq!(d33.eval(&x), 36.0 * 0.25, max_relative = 1e-14);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse("x5 + 1").is_err());
        assert!(parse("2 *").is_err());
        assert!(parse("exp x1").is_err());
        assert!(parse("(1 + x1").is_err());
        assert!(parse("x1 ^ x2").is_err());
    }
}
