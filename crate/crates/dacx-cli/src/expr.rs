//! Scalar expressions in `x`, `y` and `eps`.
//!
//! Grammar, loosest first:
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?          exponent: integer constant
//! atom    := number | var | func '(' sum ')' | '(' sum ')'
//! ```

use std::fmt;
use std::str::FromStr;

use dacx_num::{Rational, Scalar};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::CliError;
use crate::jet::Jet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
    Eps,
}

impl Var {
    fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
            Var::Eps => "eps",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Log,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Log => "log",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }

    fn prec(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(Rational),
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    /// The exponent is an integer-valued constant expression.
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// Parse failure at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for SyntaxError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Sym(char),
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

/// Exact value of a decimal literal such as `12`, `0.5` or `1.5e-3`.
fn decimal(text: &str) -> Option<Rational> {
    let (mant, exp) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    let digits = BigInt::from_str(&format!("{int}{frac}")).ok()?;
    let shift = exp - frac.len() as i32;
    let ten = Rational::from_i64(10);
    let scale = ten.powi(shift.unsigned_abs());
    let v = Rational::from_integer(digits);
    Some(if shift >= 0 { v * scale } else { v / scale })
}

fn lex(src: &str) -> Result<Vec<Token>, SyntaxError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == '.' {
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && matches!(chars[i], 'e' | 'E') {
                let mut j = i + 1;
                if j < chars.len() && matches!(chars[j], '+' | '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = decimal(&text).ok_or_else(|| SyntaxError {
                line: l0,
                col: c0,
                message: format!("malformed number {text:?}"),
            })?;
            out.push(Token {
                tok: Tok::Num(v),
                line: l0,
                col: c0,
            });
        } else if c.is_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line: l0,
                col: c0,
            });
        } else if "+-*/^()".contains(c) {
            i += 1;
            out.push(Token {
                tok: Tok::Sym(c),
                line: l0,
                col: c0,
            });
        } else {
            return Err(SyntaxError {
                line: l0,
                col: c0,
                message: format!("unexpected character {c:?}"),
            });
        }
        col += i - start;
    }
    out.push(Token {
        tok: Tok::End,
        line,
        col,
    });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    vars: &'a [Var],
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, t: &Token, message: impl Into<String>) -> Result<T, SyntaxError> {
        Err(SyntaxError {
            line: t.line,
            col: t.col,
            message: message.into(),
        })
    }

    fn describe(t: &Tok) -> String {
        match t {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("name {s:?}"),
            Tok::Sym(c) => format!("{c:?}"),
            Tok::End => "end of input".into(),
        }
    }

    fn sum(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.product()?;
        while let Tok::Sym(c @ ('+' | '-')) = self.peek().tok {
            self.bump();
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.product()?));
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.unary()?;
        while let Tok::Sym(c @ ('*' | '/')) = self.peek().tok {
            self.bump();
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, SyntaxError> {
        if self.peek().tok == Tok::Sym('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, SyntaxError> {
        let base = self.atom()?;
        if self.peek().tok != Tok::Sym('^') {
            return Ok(base);
        }
        self.bump();
        let at = self.peek().clone();
        let exp = self.unary()?;
        match exp.constant() {
            Some(v) if v.is_integer() && v.to_i32().is_some() => {
                Ok(Expr::Pow(Box::new(base), Box::new(exp)))
            }
            _ => self.err(&at, "exponent must be an integer constant"),
        }
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        let t = self.bump();
        match &t.tok {
            Tok::Num(v) => Ok(Expr::Num(v.clone())),
            Tok::Sym('(') => {
                let e = self.sum()?;
                self.expect_close(&t)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let func = match name.as_str() {
                    "exp" => Some(Func::Exp),
                    "sin" => Some(Func::Sin),
                    "cos" => Some(Func::Cos),
                    "log" => Some(Func::Log),
                    _ => None,
                };
                if let Some(f) = func {
                    let open = self.bump();
                    if open.tok != Tok::Sym('(') {
                        return self.err(&open, format!("expected '(' after {name}"));
                    }
                    let arg = self.sum()?;
                    self.expect_close(&open)?;
                    return Ok(Expr::Call(f, Box::new(arg)));
                }
                let var = match name.as_str() {
                    "x" => Var::X,
                    "y" => Var::Y,
                    "eps" => Var::Eps,
                    _ => return self.err(&t, format!("unknown name {name:?}")),
                };
                if !self.vars.contains(&var) {
                    let allowed: Vec<&str> = self.vars.iter().map(|v| v.name()).collect();
                    return self.err(
                        &t,
                        format!(
                            "variable {name} is not allowed here (allowed: {})",
                            allowed.join(", ")
                        ),
                    );
                }
                Ok(Expr::Var(var))
            }
            other => self.err(
                &t,
                format!(
                    "expected a number, variable, function or '(', found {}",
                    Self::describe(other)
                ),
            ),
        }
    }

    fn expect_close(&mut self, open: &Token) -> Result<(), SyntaxError> {
        let t = self.bump();
        if t.tok != Tok::Sym(')') {
            return self.err(
                &t,
                format!(
                    "expected ')' closing the '(' at {}:{}, found {}",
                    open.line,
                    open.col,
                    Self::describe(&t.tok)
                ),
            );
        }
        Ok(())
    }
}

/// Parses `src` admitting the variables in `vars`.
pub fn parse(src: &str, vars: &[Var]) -> Result<Expr, SyntaxError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        vars,
    };
    let e = p.sum()?;
    let t = p.peek().clone();
    if t.tok != Tok::End {
        return p.err(
            &t,
            format!(
                "unexpected {} after a complete expression",
                Parser::describe(&t.tok)
            ),
        );
    }
    Ok(e)
}

/// Decimal text when the denominator is `2^a 5^b`.
fn decimal_text(v: &Rational) -> Option<String> {
    let mut d = v.denom().clone();
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    let (mut a, mut b) = (0u32, 0u32);
    while (&d % &two).is_zero() {
        d /= &two;
        a += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        b += 1;
    }
    if !d.is_one() {
        return None;
    }
    let k = a.max(b) as usize;
    let scaled = (v.numer() * BigInt::from(10).pow(k as u32)) / v.denom();
    let digits = scaled.abs().to_string();
    let sign = if scaled.is_negative() { "-" } else { "" };
    if k == 0 {
        return Some(format!("{sign}{digits}"));
    }
    let padded = format!("{digits:0>width$}", width = k + 1);
    let (int, frac) = padded.split_at(padded.len() - k);
    Some(format!("{sign}{int}.{frac}"))
}

impl Expr {
    /// Binding strength of the printed form.
    fn prec(&self) -> u8 {
        match self {
            Expr::Bin(op, ..) => op.prec(),
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Num(v) if v.is_negative() => 3,
            Expr::Num(v) if decimal_text(v).is_none() => 2,
            _ => 5,
        }
    }

    fn write(&self, out: &mut String, min: u8) {
        let paren = self.prec() < min;
        if paren {
            out.push('(');
        }
        match self {
            Expr::Num(v) if v.is_negative() => {
                out.push('-');
                Expr::Num(-v.clone()).write(out, 4);
            }
            Expr::Num(v) => match decimal_text(v) {
                Some(t) => out.push_str(&t),
                None => out.push_str(&format!("{}/{}", v.numer(), v.denom())),
            },
            Expr::Var(v) => out.push_str(v.name()),
            Expr::Neg(a) => {
                out.push('-');
                a.write(out, 3);
            }
            Expr::Bin(op, a, b) => {
                a.write(out, op.prec());
                match op {
                    BinOp::Add | BinOp::Sub => {
                        out.push(' ');
                        out.push(op.symbol());
                        out.push(' ');
                    }
                    _ => out.push(op.symbol()),
                }
                b.write(out, op.prec() + 1);
            }
            Expr::Pow(a, e) => {
                a.write(out, 5);
                out.push('^');
                e.write(out, 3);
            }
            Expr::Call(f, a) => {
                out.push_str(f.name());
                out.push('(');
                a.write(out, 0);
                out.push(')');
            }
        }
        if paren {
            out.push(')');
        }
    }

    /// Value when the expression has no variables.
    pub fn constant(&self) -> Option<Rational> {
        match self {
            Expr::Num(v) => Some(v.clone()),
            Expr::Var(_) | Expr::Call(..) => None,
            Expr::Neg(a) => Some(-a.constant()?),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.constant()?, b.constant()?);
                match op {
                    BinOp::Add => Some(a + b),
                    BinOp::Sub => Some(a - b),
                    BinOp::Mul => Some(a * b),
                    BinOp::Div => (!b.is_zero()).then(|| a / b),
                }
            }
            Expr::Pow(a, e) => {
                let (a, n) = (a.constant()?, e.exponent()?);
                if n < 0 && a.is_zero() {
                    return None;
                }
                let p = a.powi(n.unsigned_abs());
                Some(if n < 0 { p.recip() } else { p })
            }
        }
    }

    fn exponent(&self) -> Option<i32> {
        self.constant()
            .filter(|v| v.is_integer())
            .and_then(|v| v.to_integer().to_i32())
    }

    pub fn eval(&self, x: f64, y: f64, eps: f64) -> f64 {
        match self {
            Expr::Num(v) => Scalar::to_f64(v),
            Expr::Var(Var::X) => x,
            Expr::Var(Var::Y) => y,
            Expr::Var(Var::Eps) => eps,
            Expr::Neg(a) => -a.eval(x, y, eps),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(x, y, eps), b.eval(x, y, eps));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                }
            }
            Expr::Pow(a, e) => a.eval(x, y, eps).powi(e.exponent().unwrap_or(0)),
            Expr::Call(f, a) => {
                let v = a.eval(x, y, eps);
                match f {
                    Func::Exp => v.exp(),
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Log => v.ln(),
                }
            }
        }
    }

    /// Taylor coefficients at the origin in the box `dims` over `(x, y, eps)`.
    pub fn jet<S: Scalar>(&self, dims: [usize; 3]) -> Result<Jet<S>, CliError> {
        Ok(match self {
            Expr::Num(v) => Jet::constant(dims, dacx_num::scalar::convert(v)),
            Expr::Var(v) => Jet::variable(dims, v.index()),
            Expr::Neg(a) => a.jet::<S>(dims)?.neg(),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.jet::<S>(dims)?, b.jet::<S>(dims)?);
                match op {
                    BinOp::Add => a.add(&b),
                    BinOp::Sub => a.sub(&b),
                    BinOp::Mul => a.mul(&b),
                    BinOp::Div => a.div(&b)?,
                }
            }
            Expr::Pow(a, e) => a.jet::<S>(dims)?.powi(e.exponent().unwrap_or(0) as i64)?,
            Expr::Call(f, a) => {
                let a = a.jet::<S>(dims)?;
                match f {
                    Func::Exp => a.exp(),
                    Func::Sin => a.sin_cos().0,
                    Func::Cos => a.sin_cos().1,
                    Func::Log => a.ln().map_err(|e| {
                        CliError::Domain(format!("log({}) at the origin: {e}", self.arg_text()))
                    })?,
                }
            }
        })
    }

    fn arg_text(&self) -> String {
        match self {
            Expr::Call(_, a) => a.to_string(),
            other => other.to_string(),
        }
    }

    /// Taylor coefficients in `x` alone, `order` of them.
    pub fn taylor<S: Scalar>(&self, order: usize) -> Result<Vec<S>, CliError> {
        Ok(self
            .jet::<S>([order.max(1), 1, 1])?
            .univariate()
            .into_iter()
            .take(order)
            .collect())
    }

    /// Degrees in `(x, y, eps)` when the expression is a polynomial.
    pub fn poly_degree(&self) -> Option<[usize; 3]> {
        match self {
            Expr::Num(_) => Some([0; 3]),
            Expr::Var(v) => {
                let mut d = [0; 3];
                d[v.index()] = 1;
                Some(d)
            }
            Expr::Neg(a) => a.poly_degree(),
            Expr::Bin(BinOp::Add | BinOp::Sub, a, b) => {
                let (a, b) = (a.poly_degree()?, b.poly_degree()?);
                Some([a[0].max(b[0]), a[1].max(b[1]), a[2].max(b[2])])
            }
            Expr::Bin(BinOp::Mul, a, b) => {
                let (a, b) = (a.poly_degree()?, b.poly_degree()?);
                Some([a[0] + b[0], a[1] + b[1], a[2] + b[2]])
            }
            Expr::Bin(BinOp::Div, a, b) => {
                b.constant().filter(|c| !c.is_zero())?;
                a.poly_degree()
            }
            Expr::Pow(a, e) => {
                let n = e.exponent()?;
                if n < 0 {
                    return a.constant().map(|_| [0; 3]);
                }
                let d = a.poly_degree()?;
                let n = n as usize;
                Some([d[0] * n, d[1] * n, d[2] * n])
            }
            Expr::Call(..) => self.constant().map(|_| [0; 3]),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write(&mut s, 0);
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const XYE: [Var; 3] = [Var::X, Var::Y, Var::Eps];

    fn q(a: i64, b: i64) -> Rational {
        Rational::ratio(a, b)
    }

    fn p(src: &str) -> Expr {
        parse(src, &XYE).unwrap()
    }

    #[test]
    fn taylor_of_simple_functions() {
        assert_eq!(
            p("x + 1").taylor::<Rational>(2).unwrap(),
            vec![q(1, 1), q(1, 1)]
        );
        assert_eq!(
            p("exp(x)").taylor::<Rational>(4).unwrap(),
            vec![q(1, 1), q(1, 1), q(1, 2), q(1, 6)]
        );
        assert_eq!(
            p("3*x^2 - sin(x)").taylor::<Rational>(4).unwrap(),
            vec![q(0, 1), q(-1, 1), q(3, 1), q(1, 6)]
        );
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(p("-x^2").eval(3.0, 0.0, 0.0), -9.0);
        assert_eq!(p("2^3^2").eval(0.0, 0.0, 0.0), 512.0);
        assert_eq!(p("8/4/2").eval(0.0, 0.0, 0.0), 1.0);
        assert_eq!(p("8-4-2").eval(0.0, 0.0, 0.0), 2.0);
        assert_eq!(p("2*-x").eval(3.0, 0.0, 0.0), -6.0);
        assert_eq!(p("x^-2").eval(2.0, 0.0, 0.0), 0.25);
        assert_eq!(p("1 + 2*3").eval(0.0, 0.0, 0.0), 7.0);
    }

    #[test]
    fn decimal_literals_are_exact() {
        assert_eq!(p("0.1").constant(), Some(q(1, 10)));
        assert_eq!(p("1.5e-3").constant(), Some(q(3, 2000)));
        assert_eq!(p("2E2").constant(), Some(q(200, 1)));
    }

    #[test]
    fn syntax_errors_are_located() {
        let e = parse("x +\n  * 2", &XYE).unwrap_err();
        assert_eq!((e.line, e.col), (2, 3));
        let e = parse("exp(x", &XYE).unwrap_err();
        assert_eq!((e.line, e.col), (1, 6));
        let e = parse("x^y", &XYE).unwrap_err();
        assert_eq!((e.line, e.col), (1, 3));
        let e = parse("y + 1", &[Var::X]).unwrap_err();
        assert_eq!((e.line, e.col), (1, 1));
        assert!(parse("x $ 1", &XYE).is_err());
        assert!(parse("tan(x)", &XYE).is_err());
        assert!(parse("x 1", &XYE).is_err());
    }

    #[test]
    fn log_at_the_origin_is_a_domain_error() {
        assert!(matches!(
            p("log(x)").taylor::<f64>(3),
            Err(CliError::Domain(_))
        ));
        assert!(p("log(1 + x)").taylor::<Rational>(3).is_ok());
        assert!(p("log(x)").eval(2.0, 0.0, 0.0).is_finite());
    }

    #[test]
    fn pretty_printing_is_minimal() {
        assert_eq!(
            p("(x + 1) * (x - (2 - y))").to_string(),
            "(x + 1)*(x - (2 - y))"
        );
        assert_eq!(p("(-x)^2 - -3").to_string(), "(-x)^2 - -3");
        assert_eq!(p("(x^2)^3 + x^2^3").to_string(), "(x^2)^3 + x^2^3");
        assert_eq!(p("sin((x))").to_string(), "sin(x)");
        assert_eq!(Expr::Num(q(1, 3)).to_string(), "1/3");
        assert_eq!(Expr::Num(q(-5, 4)).to_string(), "-1.25");
    }

    #[test]
    fn polynomial_degrees() {
        assert_eq!(p("x^2*y - eps*x/2").poly_degree(), Some([2, 1, 1]));
        assert_eq!(p("exp(x)").poly_degree(), None);
        assert_eq!(p("1/x").poly_degree(), None);
    }

    fn leaf() -> impl Strategy<Value = Expr> {
        prop_oneof![
            (0i64..20, 1i64..9).prop_map(|(n, d)| Expr::Num(q(n, d))),
            (0i64..400).prop_map(|n| Expr::Num(q(n, 100))),
            prop_oneof![Just(Var::X), Just(Var::Y), Just(Var::Eps)].prop_map(Expr::Var),
        ]
    }

    fn tree() -> impl Strategy<Value = Expr> {
        leaf().prop_recursive(5, 40, 2, |inner| {
            let op = prop_oneof![
                Just(BinOp::Add),
                Just(BinOp::Sub),
                Just(BinOp::Mul),
                Just(BinOp::Div)
            ];
            let func = prop_oneof![
                Just(Func::Exp),
                Just(Func::Sin),
                Just(Func::Cos),
                Just(Func::Log)
            ];
            prop_oneof![
                (op, inner.clone(), inner.clone()).prop_map(|(o, a, b)| Expr::Bin(
                    o,
                    Box::new(a),
                    Box::new(b)
                )),
                inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
                (inner.clone(), -3i64..4).prop_map(|(a, n)| {
                    let e = if n < 0 {
                        Expr::Neg(Box::new(Expr::Num(q(-n, 1))))
                    } else {
                        Expr::Num(q(n, 1))
                    };
                    Expr::Pow(Box::new(a), Box::new(e))
                }),
                (func, inner).prop_map(|(f, a)| Expr::Call(f, Box::new(a))),
            ]
        })
    }

    proptest! {
        #[test]
        fn pretty_parse_pretty_is_a_fixed_point(e in tree()) {
            let once = e.to_string();
            let again = parse(&once, &XYE).map_err(|err| TestCaseError::fail(format!("{once}: {err}")))?;
            prop_assert_eq!(again.to_string(), once);
        }

        #[test]
        fn parsed_tree_evaluates_like_the_original(e in tree(), x in -0.9f64..0.9, y in -0.9f64..0.9) {
            let back = parse(&e.to_string(), &XYE).unwrap();
            let (a, b) = (e.eval(x, y, 0.3), back.eval(x, y, 0.3));
            prop_assert!(a == b || (a.is_nan() && b.is_nan()) || (a - b).abs() <= 1e-12 * a.abs().max(1.0), "{} vs {}", a, b);
        }

        #[test]
        fn taylor_matches_finite_differences(a in -2.0f64..2.0, b in 0.5f64..2.0) {
            let src = format!("exp({a}*x)*cos(x) + log({b} + x)/(2 + sin(x))");
            let e = p(&src);
            let t = e.taylor::<f64>(2).unwrap();
            let h = 1e-3;
            let f = |x: f64| e.eval(x, 0.0, 0.0);
            let d = (f(-2.0 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2.0 * h)) / (12.0 * h);
            prop_assert!((t[0] - f(0.0)).abs() < 1e-12);
            prop_assert!((t[1] - d).abs() < 1e-6 * d.abs().max(1.0));
        }
    }
}
