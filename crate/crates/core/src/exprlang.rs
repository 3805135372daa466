//! Scalar expressions over chart coordinates.
//!
//! Grammar (whitespace is insignificant, no implicit multiplication):
//!
//! ```text
//! expr     = term , { ( "+" | "-" ) , term } ;
//! term     = unary , { ( "*" | "/" ) , unary } ;
//! unary    = "-" , unary | power ;
//! power    = primary , { "^" , exponent } ;
//! exponent = [ "+" | "-" ] , number
//!          | "(" , [ "+" | "-" ] , number , ")" ;
//! primary  = number | variable | "pi"
//!          | func , "(" , expr , ")"
//!          | "(" , expr , ")" ;
//! func     = "sin" | "cos" | "exp" | "log" | "sqrt" ;
//! variable = "x" , digit , { digit } ;        (* x1 .. x{dim} *)
//! number   = digit , { digit } , [ "." , { digit } ] , [ ( "e" | "E" ) , [ "+" | "-" ] , digit , { digit } ] ;
//! ```
//!
//! Precedence from tightest: `^`, unary `-`, `* /`, `+ -`; binary operators
//! associate to the left. Exponents must be integer or half-integer constants.
//! Integer powers evaluate by repeated multiplication, half-integer powers as
//! `exp(p * log(base))`.

use std::fmt;

use crate::error::{CurvError, Result};
use crate::jets::{ArithOp, Elementary, Jet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    fn name(&self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    fn elementary(&self) -> Elementary {
        match self {
            Func::Sin => Elementary::Sin,
            Func::Cos => Elementary::Cos,
            Func::Exp => Elementary::Exp,
            Func::Log => Elementary::Log,
            Func::Sqrt => Elementary::Sqrt,
        }
    }
}

/// Expression tree. Variables are zero-based (`x1` is `Var(0)`).
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    /// Base raised to a constant integer or half-integer exponent.
    Pow(Box<Expr>, f64),
    Call(Func, Box<Expr>),
}

fn valid_exponent(p: f64) -> bool {
    p.is_finite() && (2.0 * p).fract() == 0.0
}

impl Expr {
    /// Longest root-to-leaf path, counted in edges.
    pub fn depth(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) => 0,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => 1 + a.depth(),
            Expr::Binary(_, a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Highest variable index used, plus one.
    pub fn arity(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(i) => i + 1,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.arity(),
            Expr::Binary(_, a, b) => a.arity().max(b.arity()),
        }
    }

    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    /// Evaluates over jets; all coordinate jets must share dim and order.
    pub fn evaluate(&self, coords: &[Jet]) -> Result<Jet> {
        let proto = coords.first().ok_or_else(|| {
            CurvError::Precondition("evaluate needs at least one coordinate jet".into())
        })?;
        self.eval_jet(coords, proto)
    }

    fn eval_jet(&self, coords: &[Jet], proto: &Jet) -> Result<Jet> {
        let located = |e: CurvError| match e {
            CurvError::EvaluationDomain {
                func,
                value,
                location,
            } if location.is_empty() => CurvError::EvaluationDomain {
                func,
                value,
                location: self.to_string(),
            },
            other => other,
        };
        match self {
            Expr::Const(c) => Ok(proto.constant_like(*c)),
            Expr::Var(i) => coords
                .get(*i)
                .cloned()
                .ok_or(CurvError::VariableOutOfRange {
                    index: i + 1,
                    dim: coords.len(),
                    offset: 0,
                }),
            Expr::Neg(a) => Ok(-&a.eval_jet(coords, proto)?),
            Expr::Binary(op, a, b) => {
                let x = a.eval_jet(coords, proto)?;
                let y = b.eval_jet(coords, proto)?;
                let op = match op {
                    BinOp::Add => ArithOp::Add,
                    BinOp::Sub => ArithOp::Sub,
                    BinOp::Mul => ArithOp::Mul,
                    BinOp::Div => ArithOp::Div,
                };
                x.arith(&y, op).map_err(located)
            }
            Expr::Pow(a, p) => {
                let x = a.eval_jet(coords, proto)?;
                if p.fract() == 0.0 {
                    x.powi(*p as i32).map_err(located)
                } else {
                    x.ln().and_then(|l| l.scale(*p).exp()).map_err(|_| {
                        CurvError::EvaluationDomain {
                            func: "pow".into(),
                            value: x.value(),
                            location: self.to_string(),
                        }
                    })
                }
            }
            Expr::Call(f, a) => {
                let x = a.eval_jet(coords, proto)?;
                x.apply(f.elementary()).map_err(located)
            }
        }
    }

    /// Plain recursive evaluation on numbers.
    pub fn eval_f64(&self, x: &[f64]) -> Result<f64> {
        let domain = |func: &str, value: f64| CurvError::EvaluationDomain {
            func: func.into(),
            value,
            location: self.to_string(),
        };
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Var(i) => *x.get(*i).ok_or(CurvError::VariableOutOfRange {
                index: i + 1,
                dim: x.len(),
                offset: 0,
            })?,
            Expr::Neg(a) => -a.eval_f64(x)?,
            Expr::Binary(op, a, b) => {
                let (u, v) = (a.eval_f64(x)?, b.eval_f64(x)?);
                match op {
                    BinOp::Add => u + v,
                    BinOp::Sub => u - v,
                    BinOp::Mul => u * v,
                    BinOp::Div => {
                        if v == 0.0 {
                            return Err(domain("division", v));
                        }
                        u / v
                    }
                }
            }
            Expr::Pow(a, p) => {
                let u = a.eval_f64(x)?;
                if p.fract() == 0.0 {
                    if *p < 0.0 && u == 0.0 {
                        return Err(domain("division", u));
                    }
                    u.powi(*p as i32)
                } else {
                    if u <= 0.0 {
                        return Err(domain("pow", u));
                    }
                    let r = (p * u.ln()).exp();
                    if !r.is_finite() {
                        return Err(domain("pow", u));
                    }
                    r
                }
            }
            Expr::Call(f, a) => {
                let u = a.eval_f64(x)?;
                match f {
                    Func::Sin => u.sin(),
                    Func::Cos => u.cos(),
                    Func::Exp => {
                        if !u.exp().is_finite() {
                            return Err(domain("exp", u));
                        }
                        u.exp()
                    }
                    Func::Log => {
                        if u <= 0.0 {
                            return Err(domain("log", u));
                        }
                        u.ln()
                    }
                    Func::Sqrt => {
                        if u < 0.0 {
                            return Err(domain("sqrt", u));
                        }
                        u.sqrt()
                    }
                }
            }
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(c) if *c < 0.0 => 0,
            _ => 5,
        }
    }
}

fn write_num(f: &mut fmt::Formatter<'_>, c: f64) -> fmt::Result {
    if c < 0.0 {
        write!(f, "(-{})", -c)
    } else {
        write!(f, "{c}")
    }
}

fn wrap(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Canonical printer: minimal parentheses that re-parse to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write_num(f, *c),
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Neg(a) => {
                write!(f, "-")?;
                wrap(f, a, a.precedence() < 3)
            }
            Expr::Binary(op, a, b) => {
                let p = self.precedence();
                wrap(f, a, a.precedence() < p)?;
                let sym = match op {
                    BinOp::Add => " + ",
                    BinOp::Sub => " - ",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                };
                write!(f, "{sym}")?;
                wrap(f, b, b.precedence() <= p)
            }
            Expr::Pow(a, p) => {
                wrap(f, a, a.precedence() < 5)?;
                write!(f, "^")?;
                write_num(f, *p)
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let value: f64 = text.parse().map_err(|_| CurvError::Syntax {
                offset: start,
                message: format!("malformed number `{text}`"),
            })?;
            out.push((Tok::Num(value), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Sym(c), i));
            i += 1;
        } else {
            let ch = src[i..].chars().next().unwrap_or('?');
            return Err(CurvError::Syntax {
                offset: i,
                message: format!("unexpected character `{ch}`"),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    dim: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|&(_, o)| o)
            .unwrap_or(self.src.len())
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    fn error(&self, message: String) -> CurvError {
        let found = match self.peek() {
            None => "end of input".to_string(),
            Some(Tok::Num(n)) => format!("number {n}"),
            Some(Tok::Ident(s)) => format!("`{s}`"),
            Some(Tok::Sym(c)) => format!("`{c}`"),
        };
        CurvError::Syntax {
            offset: self.offset(),
            message: format!("{message}, found {found}"),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat('+') {
                BinOp::Add
            } else if self.eat('-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat('*') {
                BinOp::Mul
            } else if self.eat('/') {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let mut base = self.primary()?;
        while self.eat('^') {
            let p = self.exponent()?;
            base = Expr::Pow(Box::new(base), p);
        }
        Ok(base)
    }

    fn signed_number(&mut self) -> Result<f64> {
        let sign = if self.eat('-') {
            -1.0
        } else {
            self.eat('+');
            1.0
        };
        match self.peek() {
            Some(&Tok::Num(n)) => {
                self.pos += 1;
                Ok(sign * n)
            }
            _ => Err(self.error("exponent must be a numeric constant".into())),
        }
    }

    fn exponent(&mut self) -> Result<f64> {
        let p = if self.eat('(') {
            let p = self.signed_number()?;
            self.expect(')')?;
            p
        } else {
            self.signed_number()?
        };
        if !valid_exponent(p) {
            return Err(CurvError::BadExponent(p));
        }
        Ok(p)
    }

    fn primary(&mut self) -> Result<Expr> {
        let offset = self.offset();
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Expr::Const(n))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if name == "pi" {
                    return Ok(Expr::Const(std::f64::consts::PI));
                }
                if let Some(func) = Func::from_name(&name) {
                    self.expect('(')?;
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return Ok(Expr::Call(func, Box::new(arg)));
                }
                if let Some(digits) = name.strip_prefix('x') {
                    if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                        let index: usize = digits.parse().unwrap_or(usize::MAX);
                        if index == 0 || index > self.dim {
                            return Err(CurvError::VariableOutOfRange {
                                index,
                                dim: self.dim,
                                offset,
                            });
                        }
                        return Ok(Expr::Var(index - 1));
                    }
                }
                Err(CurvError::UnknownIdentifier { name, offset })
            }
            _ => Err(self.error("expected a number, variable, function or `(`".into())),
        }
    }
}

/// Parses `source` for a chart of dimension `dim` (variables `x1..x{dim}`).
pub fn parse(source: &str, dim: usize) -> Result<Expr> {
    let toks = tokenize(source)?;
    let mut p = Parser {
        toks,
        pos: 0,
        dim,
        src: source,
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.error("unexpected trailing input".into()));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_expression_has_depth_three() {
        let e = parse("x1^2*x2 + sin(x3)", 4).unwrap();
        assert_eq!(e.depth(), 3);
        assert!(matches!(e, Expr::Binary(BinOp::Add, _, _)));
    }

    #[test]
    fn out_of_range_variable() {
        match parse("x5", 4) {
            Err(CurvError::VariableOutOfRange { index, dim, offset }) => {
                assert_eq!((index, dim, offset), (5, 4, 0));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse("x0", 4),
            Err(CurvError::VariableOutOfRange { .. })
        ));
    }

    #[test]
    fn fubini_study_coefficient_at_origin() {
        let e = parse("1/(1+x1^2+x2^2)^2", 2).unwrap();
        assert_eq!(e.eval_f64(&[0.0, 0.0]).unwrap(), 1.0);
        let (a, b) = (0.3f64, -0.8f64);
        let direct = 1.0 / (1.0 + a * a + b * b).powi(2);
        assert!((e.eval_f64(&[a, b]).unwrap() - direct).abs() < 1e-15);
    }

    #[test]
    fn precedence_and_associativity() {
        let e = parse("-x1^2", 1).unwrap();
        assert_eq!(e.eval_f64(&[3.0]).unwrap(), -9.0);
        let e = parse("8 - 3 - 2", 1).unwrap();
        assert_eq!(e.eval_f64(&[0.0]).unwrap(), 3.0);
        let e = parse("8 / 4 / 2", 1).unwrap();
        assert_eq!(e.eval_f64(&[0.0]).unwrap(), 1.0);
        let e = parse("2 + 3*4", 1).unwrap();
        assert_eq!(e.eval_f64(&[0.0]).unwrap(), 14.0);
        let e = parse("x1^-2", 1).unwrap();
        assert_eq!(e.eval_f64(&[2.0]).unwrap(), 0.25);
        let e = parse(" x1 ^ ( 1.5 ) ", 1).unwrap();
        assert!((e.eval_f64(&[4.0]).unwrap() - 8.0).abs() < 1e-14);
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        match parse("x1 + * x2", 2) {
            Err(CurvError::Syntax { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("unexpected {other:?}"),
        }
        match parse("2 x1", 2) {
            Err(CurvError::Syntax { offset, .. }) => assert_eq!(offset, 2),
            other => panic!("unexpected {other:?}"),
        }
        match parse("(x1", 1) {
            Err(CurvError::Syntax { offset, .. }) => assert_eq!(offset, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse("x1 $ 2", 1),
            Err(CurvError::Syntax { offset: 3, .. })
        ));
    }

    #[test]
    fn unknown_identifier_and_bad_exponent() {
        assert!(matches!(
            parse("tan(x1)", 1),
            Err(CurvError::UnknownIdentifier { offset: 0, .. })
        ));
        assert!(matches!(parse("x1^0.3", 1), Err(CurvError::BadExponent(_))));
        assert!(matches!(parse("x1^x1", 1), Err(CurvError::Syntax { .. })));
    }

    #[test]
    fn jet_evaluation_of_sum() {
        let e = parse("x1+x2", 2).unwrap();
        let x = Jet::seed(&[1.0, 2.0], 1).unwrap();
        let v = e.evaluate(&x).unwrap();
        assert_eq!(v.value(), 3.0);
        assert_eq!(v.gradient(), vec![1.0, 1.0]);
    }

    #[test]
    fn log_of_negative_reports_location() {
        let e = parse("log(x1)", 1).unwrap();
        let x = Jet::seed(&[-1.0], 2).unwrap();
        match e.evaluate(&x) {
            Err(CurvError::EvaluationDomain {
                func,
                value,
                location,
            }) => {
                assert_eq!(func, "log");
                assert_eq!(value, -1.0);
                assert_eq!(location, "log(x1)");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(e.eval_f64(&[-1.0]).is_err());
    }

    #[test]
    fn printer_is_minimal_and_stable() {
        let cases = [
            ("x1^2*x2 + sin(x3)", "x1^2*x2 + sin(x3)"),
            ("(x1+x2)*x3", "(x1 + x2)*x3"),
            ("x1-(x2-x3)", "x1 - (x2 - x3)"),
            ("-(x1+1)^2", "-(x1 + 1)^2"),
            ("(-x1)^2", "(-x1)^2"),
            ("x1^-2", "x1^(-2)"),
        ];
        for (src, printed) in cases {
            let e = parse(src, 3).unwrap();
            assert_eq!(e.to_string(), printed);
            assert_eq!(parse(&e.to_string(), 3).unwrap(), e);
        }
    }
}
