//! Expression lexer, Pratt parser and evaluator.
//!
//! Precedence from loosest to tightest: `+ -`, then `* / &`, then unary `-`,
//! then `^` with a literal exponent. `&` is the wedge product, `dxi` the
//! differential of the base variable `xi`, `d(e)` the exterior derivative
//! and `sqrt(e)` a declared radical.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exterior::KForm;
use crate::ring::{Polynomial, Rational, ScaledFraction, VarRef, VarTable};

/// One-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl Pos {
    pub fn new(line: usize, col: usize) -> Pos {
        Pos { line, col }
    }

    pub(crate) fn err<T>(self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            line: self.line,
            col: self.col,
            msg: msg.into(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Op(char),
    End,
}

fn lex(text: &str, start: Pos) -> Result<Vec<(Tok, Pos)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (start.line, start.col);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos::new(line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(char::is_ascii_digit)) {
            let s = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let lit: String = chars[s..i].iter().collect();
            col += i - s;
            out.push((Tok::Num(decimal(&lit, pos)?), pos));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let s = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - s;
            out.push((Tok::Ident(chars[s..i].iter().collect()), pos));
            continue;
        }
        let op = match c {
            '−' => '-',
            '·' => '*',
            '∧' => '&',
            c => c,
        };
        if !"+-*/^&(),".contains(op) {
            return pos.err(format!("unexpected character `{c}`"));
        }
        out.push((Tok::Op(op), pos));
        i += 1;
        col += 1;
    }
    out.push((Tok::End, Pos::new(line, col)));
    Ok(out)
}

fn decimal(lit: &str, pos: Pos) -> Result<Rational> {
    let (int, frac) = lit.split_once('.').unwrap_or((lit, ""));
    if frac.contains('.') {
        return pos.err(format!("malformed number `{lit}`"));
    }
    let digits = format!("{int}{frac}");
    let n: BigInt = digits
        .parse()
        .or_else(|_| pos.err(format!("malformed number `{lit}`")))?;
    let d = num_traits::pow(BigInt::from(10), frac.len());
    Ok(Rational::new(n, d))
}

/// Parsed expression tree; identifiers are resolved at evaluation time.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(Rational),
    Ident(String, Pos),
    Neg(Box<Expr>),
    Bin(char, Box<Expr>, Box<Expr>, Pos),
    Pow(Box<Expr>, Rational, Pos),
    Call(String, Box<Expr>, Pos),
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, c: char) -> Result<()> {
        match self.bump() {
            (Tok::Op(o), _) if o == c => Ok(()),
            (t, p) => p.err(format!("expected `{c}`, found {}", describe(&t))),
        }
    }

    fn expr(&mut self, min_bp: u8) -> Result<Expr> {
        let mut lhs = self.prefix()?;
        loop {
            let (op, pos) = match self.peek() {
                Tok::Op(c) => (*c, self.pos()),
                Tok::End => break,
                t => {
                    return self
                        .pos()
                        .err(format!("expected an operator, found {}", describe(t)))
                }
            };
            let (l_bp, r_bp) = match op {
                '+' | '-' => (10, 11),
                '*' | '/' | '&' => (20, 21),
                '^' => (40, 40),
                ')' | ',' => break,
                _ => return pos.err(format!("unexpected `{op}`")),
            };
            if l_bp < min_bp {
                break;
            }
            self.bump();
            if op == '^' {
                let e = self.exponent()?;
                lhs = Expr::Pow(Box::new(lhs), e, pos);
                if self.peek() == &Tok::Op('^') {
                    return self.pos().err("chained powers need parentheses");
                }
                continue;
            }
            let rhs = self.expr(r_bp)?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs), pos);
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Expr> {
        match self.bump() {
            (Tok::Num(r), _) => Ok(Expr::Num(r)),
            (Tok::Ident(name), pos) => {
                if self.peek() == &Tok::Op('(') {
                    self.bump();
                    let arg = self.expr(0)?;
                    self.expect(')')?;
                    return Ok(Expr::Call(name, Box::new(arg), pos));
                }
                Ok(Expr::Ident(name, pos))
            }
            (Tok::Op('-'), _) => Ok(Expr::Neg(Box::new(self.expr(30)?))),
            (Tok::Op('('), _) => {
                let e = self.expr(0)?;
                self.expect(')')?;
                Ok(e)
            }
            (t, pos) => pos.err(format!("expected an operand, found {}", describe(&t))),
        }
    }

    /// `2`, `-1`, `(-5/2)`.
    fn exponent(&mut self) -> Result<Rational> {
        let paren = self.peek() == &Tok::Op('(');
        if paren {
            self.bump();
        }
        let neg = self.peek() == &Tok::Op('-');
        if neg {
            self.bump();
        }
        let mut r = match self.bump() {
            (Tok::Num(r), _) => r,
            (t, p) => return p.err(format!("expected an exponent, found {}", describe(&t))),
        };
        if paren && self.peek() == &Tok::Op('/') {
            self.bump();
            match self.bump() {
                (Tok::Num(d), _) if !d.is_zero() => r /= d,
                (_, p) => return p.err("expected a nonzero denominator"),
            }
        }
        if paren {
            self.expect(')')?;
        }
        Ok(if neg { -r } else { r })
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(r) => format!("number `{r}`"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Op(c) => format!("`{c}`"),
        Tok::End => "end of input".into(),
    }
}

/// Parses `text` whose first character sits at `start`.
pub fn parse_expr_at(text: &str, start: Pos) -> Result<Expr> {
    let toks = lex(text, start)?;
    let mut p = Parser { toks, at: 0 };
    if p.peek() == &Tok::End {
        return p.pos().err("empty expression");
    }
    let e = p.expr(0)?;
    match p.bump() {
        (Tok::End, _) => Ok(e),
        (t, pos) => pos.err(format!("unexpected {}", describe(&t))),
    }
}

pub fn parse_expr(text: &str) -> Result<Expr> {
    parse_expr_at(text, Pos::new(1, 1))
}

/// Result of evaluating an expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Val {
    Scalar(ScaledFraction),
    Form(KForm),
}

impl Val {
    pub fn into_form(self) -> KForm {
        match self {
            Val::Scalar(s) => KForm::scalar(s),
            Val::Form(f) => f,
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            Val::Scalar(_) => 0,
            Val::Form(f) => f.degree(),
        }
    }

    fn scalar(self) -> Option<ScaledFraction> {
        match self {
            Val::Scalar(s) => Some(s),
            Val::Form(f) if f.degree() == 0 => Some(f.coeff(&[])),
            Val::Form(_) => None,
        }
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Scalar(s) => write!(f, "{s}"),
            Val::Form(k) => write!(f, "{k}"),
        }
    }
}

/// Names visible to expressions.
#[derive(Debug, Clone)]
pub struct Scope {
    vt: Arc<VarTable>,
    defs: BTreeMap<String, Val>,
    positive: Vec<Polynomial>,
}

impl Scope {
    pub fn new(vt: &Arc<VarTable>) -> Scope {
        Scope {
            vt: vt.clone(),
            defs: BTreeMap::new(),
            positive: Vec::new(),
        }
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        &self.vt
    }

    pub fn define(&mut self, name: &str, v: Val) {
        self.defs.insert(name.to_string(), v);
    }

    pub fn get(&self, name: &str) -> Option<&Val> {
        self.defs.get(name)
    }

    /// Declares `b > 0`, which licenses rational exponents on `b`.
    pub fn declare_positive(&mut self, b: Polynomial) {
        if !self.positive.contains(&b) {
            self.positive.push(b);
        }
    }

    pub fn positive_bases(&self) -> &[Polynomial] {
        &self.positive
    }

    pub fn eval_str(&self, text: &str) -> Result<Val> {
        parse_expr(text)?.eval(self)
    }

    pub fn scalar(&self, text: &str) -> Result<ScaledFraction> {
        self.scalar_at(text, Pos::new(1, 1))
    }

    pub fn scalar_at(&self, text: &str, pos: Pos) -> Result<ScaledFraction> {
        match parse_expr_at(text, pos)?.eval(self)?.scalar() {
            Some(s) => Ok(s),
            None => pos.err("expected a scalar, found a form"),
        }
    }

    pub fn polynomial(&self, text: &str) -> Result<Polynomial> {
        self.polynomial_at(text, Pos::new(1, 1))
    }

    pub fn polynomial_at(&self, text: &str, pos: Pos) -> Result<Polynomial> {
        match self.scalar_at(text, pos)?.as_polynomial() {
            Some(p) => Ok(p),
            None => pos.err("expected a polynomial"),
        }
    }

    pub fn form(&self, text: &str) -> Result<KForm> {
        self.form_at(text, Pos::new(1, 1))
    }

    pub fn form_at(&self, text: &str, pos: Pos) -> Result<KForm> {
        Ok(parse_expr_at(text, pos)?.eval(self)?.into_form())
    }
}

fn at<T>(pos: Pos, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { .. } => e,
        e => Error::Parse {
            line: pos.line,
            col: pos.col,
            msg: e.to_string(),
        },
    })
}

fn pow_scalar(b: &ScaledFraction, e: u32) -> Result<ScaledFraction> {
    let mut acc = ScaledFraction::one(b.vars());
    for _ in 0..e {
        acc = acc.try_mul(b)?;
    }
    Ok(acc)
}

impl Expr {
    pub fn eval(&self, scope: &Scope) -> Result<Val> {
        let vt = &scope.vt;
        match self {
            Expr::Num(r) => Ok(Val::Scalar(ScaledFraction::constant(vt, r.clone()))),
            Expr::Ident(name, pos) => resolve(scope, name, *pos),
            Expr::Neg(e) => Ok(match e.eval(scope)? {
                Val::Scalar(s) => Val::Scalar(-s),
                Val::Form(f) => Val::Form(f.neg()),
            }),
            Expr::Call(name, arg, pos) => {
                let v = arg.eval(scope)?;
                match name.as_str() {
                    "d" => at(*pos, v.into_form().d()).map(Val::Form),
                    "sqrt" => {
                        let Some(p) = v.scalar().and_then(|s| s.as_polynomial()) else {
                            return pos.err("sqrt needs a polynomial argument");
                        };
                        let found = (0..vt.nrad()).find(|&r| VarTable::radical_square(vt, r) == p);
                        match found {
                            Some(r) => Ok(Val::Scalar(Polynomial::radical(vt, r).into())),
                            None => pos.err(format!("no radical is declared with square {p}")),
                        }
                    }
                    _ => pos.err(format!("unknown function `{name}`")),
                }
            }
            Expr::Pow(base, e, pos) => {
                let Some(b) = base.eval(scope)?.scalar() else {
                    return pos.err("forms cannot be raised to a power");
                };
                let atomic = matches!(**base, Expr::Ident(..) | Expr::Num(_));
                let positive = b
                    .as_polynomial()
                    .is_some_and(|p| scope.positive.contains(&p));
                if e.is_integer() && !e.is_negative() {
                    let k = u32::try_from(e.numer()).or_else(|_| pos.err("exponent too large"))?;
                    return at(*pos, pow_scalar(&b, k)).map(Val::Scalar);
                }
                if e.is_integer() {
                    if !atomic && !positive {
                        return pos.err(
                            "negative exponents on compound bases need a declared positive base",
                        );
                    }
                    let k = u32::try_from(-e.numer()).or_else(|_| pos.err("exponent too large"))?;
                    let r = at(*pos, b.recip())?;
                    return at(*pos, pow_scalar(&r, k)).map(Val::Scalar);
                }
                if !positive {
                    return pos.err("rational exponents need a declared positive base");
                }
                let p = b.as_polynomial().expect("positive bases are polynomials");
                at(*pos, ScaledFraction::power(p, e.clone())).map(Val::Scalar)
            }
            Expr::Bin(op, l, r, pos) => {
                let (a, b) = (l.eval(scope)?, r.eval(scope)?);
                at(*pos, binary(*op, a, b, *pos))
            }
        }
    }
}

fn resolve(scope: &Scope, name: &str, pos: Pos) -> Result<Val> {
    let vt = &scope.vt;
    if let Some(v) = scope.defs.get(name) {
        return Ok(v.clone());
    }
    match vt.lookup(name) {
        Some(VarRef::Base(i)) => return Ok(Val::Scalar(Polynomial::var(vt, i).into())),
        Some(VarRef::Radical(r)) => return Ok(Val::Scalar(Polynomial::radical(vt, r).into())),
        Some(VarRef::Time(_)) => {
            return pos.err(format!(
                "time variable `{name}` cannot appear in expressions"
            ))
        }
        None => {}
    }
    if let Some(rest) = name.strip_prefix('d') {
        if let Some(VarRef::Base(i)) = vt.lookup(rest) {
            return Ok(Val::Form(KForm::dx(vt, i)));
        }
    }
    pos.err(format!("unknown identifier `{name}`"))
}

fn binary(op: char, a: Val, b: Val, pos: Pos) -> Result<Val> {
    match op {
        '+' | '-' => match (a, b) {
            (Val::Scalar(x), Val::Scalar(y)) => {
                let r = if op == '+' {
                    x.try_add(&y)
                } else {
                    x.try_sub(&y)
                };
                r.map(Val::Scalar)
            }
            (a, b) => {
                let (x, y) = (a.into_form(), b.into_form());
                if x.degree() != y.degree() {
                    return pos.err(format!(
                        "cannot add forms of degree {} and {}",
                        x.degree(),
                        y.degree()
                    ));
                }
                let r = if op == '+' {
                    x.try_add(&y)
                } else {
                    x.try_sub(&y)
                };
                r.map(Val::Form)
            }
        },
        '*' => match (a, b) {
            (Val::Scalar(x), Val::Scalar(y)) => x.try_mul(&y).map(Val::Scalar),
            (Val::Scalar(c), Val::Form(f)) | (Val::Form(f), Val::Scalar(c)) => {
                f.scale_by(&c).map(Val::Form)
            }
            (Val::Form(x), Val::Form(y)) => {
                if x.degree() > 0 && y.degree() > 0 {
                    return pos.err("use `&` for the wedge product of forms");
                }
                x.wedge(&y).map(Val::Form)
            }
        },
        '&' => a.into_form().wedge(&b.into_form()).map(Val::Form),
        '/' => {
            let Some(den) = b.scalar() else {
                return pos.err("cannot divide by a form");
            };
            match a {
                Val::Scalar(x) => x.try_div(&den).map(Val::Scalar),
                Val::Form(f) => f.scale_by(&den.recip()?).map(Val::Form),
            }
        }
        _ => pos.err(format!("unknown operator `{op}`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{ratio, VarTable};

    fn scope() -> Scope {
        Scope::new(&VarTable::base_only(&["x1", "x2", "x3"]))
    }

    #[test]
    fn error_points_at_the_operand() {
        match scope().eval_str("x1 +* x2") {
            Err(Error::Parse { line, col, .. }) => assert_eq!((line, col), (1, 5)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rational_power_of_positive_base() {
        let mut s = scope();
        let g = s.polynomial("x1^2 + x2^2 + 1").unwrap();
        s.define("g", Val::Scalar(g.clone().into()));
        assert!(s.scalar("g^(-5/2)").is_err());
        s.declare_positive(g.clone());
        let v = s.scalar("g^(-5/2)").unwrap();
        assert_eq!(v.powers(), &[(g, ratio(-5, 2))]);
    }

    #[test]
    fn printed_values_parse_back() {
        let mut s = scope();
        let g = s.polynomial("x1^2 + x2^2 + 1").unwrap();
        s.declare_positive(g);
        for text in [
            "2*x1^2*x2 - 3/4*x3 + 1",
            "x1/(x2^2 + 1)",
            "(x1^2 + x2^2 + 1)^(-3/2)*x3",
            "x1*dx2 & dx3 - x2^2*dx1&dx3",
        ] {
            let v = s.eval_str(text).unwrap();
            let again = s.eval_str(&v.to_string()).unwrap();
            assert_eq!(v, again, "{text} -> {v}");
        }
    }

    #[test]
    fn precedence() {
        let s = scope();
        let a = s.polynomial("-x1^2").unwrap();
        let b = s.polynomial("-(x1^2)").unwrap();
        assert_eq!(a, b);
        assert!(s.polynomial("2^3^2").is_err());
        assert_eq!(
            s.polynomial("(2^3)^2").unwrap(),
            s.polynomial("64").unwrap()
        );
        assert_eq!(
            s.polynomial("1 - 2 - 3").unwrap(),
            s.polynomial("-4").unwrap()
        );
        assert_eq!(
            s.polynomial("0.25*x1").unwrap(),
            s.polynomial("1/4*x1").unwrap()
        );
    }

    #[test]
    fn forms() {
        let s = scope();
        let w = s.form("x1*dx2 - x2*dx1").unwrap();
        assert_eq!(w.degree(), 1);
        let dw = s.form("d(x1*dx2 - x2*dx1)").unwrap();
        assert_eq!(dw, s.form("2*dx1&dx2").unwrap());
        assert!(s.eval_str("dx1*dx2").is_err());
        assert!(s.eval_str("dx1 + x1").is_err());
        assert!(s.eval_str("y").is_err());
    }

    #[test]
    fn unicode_operators() {
        let s = scope();
        assert_eq!(
            s.form("x1·dx1∧dx2 − dx2∧dx3").unwrap(),
            s.form("x1*dx1&dx2 - dx2&dx3").unwrap()
        );
    }
}
