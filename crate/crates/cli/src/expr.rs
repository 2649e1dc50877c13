//! Expressions over groupoid algebras and Leavitt algebras.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*'? factor)*
//! factor := '-' factor | scalar | atom | '(' expr ')'
//! scalar := number | number 'i' | 'i'
//! atom   := 'chi[' NAME ']' | 'delta[' ID ']' | 's' digits '\''?
//! ```
//!
//! Constant subexpressions are folded while parsing, so `(1+2i)` is a single
//! complex literal and printing a parsed expression is idempotent.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use lpgpd::convolution::{convolve, AlgebraElement};
use lpgpd::cuntz::{CuntzWord, LeavittPolynomial};
use lpgpd::{FiniteGroupoid, Slice, C};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("{0}")]
    WrongMode(String),
    #[error(transparent)]
    Library(#[from] lpgpd::Error),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(C<f64>),
    Chi(String),
    Delta(String),
    Gen { j: usize, star: bool },
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Imag(f64),
    Chi(String),
    Delta(String),
    Gen(usize, bool),
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn err<T>(&self, pos: usize, msg: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError::Syntax { pos, msg: msg.into() })
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn bracketed(&mut self, keyword: &str) -> Result<String, ExprError> {
        let start = self.pos;
        self.pos += keyword.len();
        match self.rest().find(']') {
            Some(end) => {
                let name = self.rest()[..end].trim().to_string();
                self.pos += end + 1;
                if name.is_empty() {
                    return self.err(start, format!("empty name in {keyword}]"));
                }
                Ok(name)
            }
            None => self.err(start, format!("unclosed {keyword}")),
        }
    }

    fn number(&mut self) -> Result<f64, ExprError> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut end = self.pos;
        while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
            end += 1;
        }
        if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
            let mut k = end + 1;
            if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                k += 1;
            }
            if k < bytes.len() && bytes[k].is_ascii_digit() {
                while k < bytes.len() && bytes[k].is_ascii_digit() {
                    k += 1;
                }
                end = k;
            }
        }
        self.pos = end;
        match self.src[start..end].parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => self.err(start, format!("bad number `{}`", &self.src[start..end])),
        }
    }

    fn tokens(mut self) -> Result<Vec<(usize, Tok)>, ExprError> {
        let mut out = Vec::new();
        loop {
            let trimmed = self.rest().trim_start();
            self.pos = self.src.len() - trimmed.len();
            let Some(c) = trimmed.chars().next() else { break };
            let start = self.pos;
            let tok = match c {
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                _ if trimmed.starts_with("chi[") => {
                    out.push((start, Tok::Chi(self.bracketed("chi[")?)));
                    continue;
                }
                _ if trimmed.starts_with("delta[") => {
                    out.push((start, Tok::Delta(self.bracketed("delta[")?)));
                    continue;
                }
                's' => {
                    self.pos += 1;
                    let digits: String = self.rest().chars().take_while(char::is_ascii_digit).collect();
                    if digits.is_empty() {
                        return self.err(start, "expected a generator index after `s`");
                    }
                    self.pos += digits.len();
                    let star = self.rest().starts_with('\'');
                    if star {
                        self.pos += 1;
                    }
                    let j = digits.parse().or_else(|_| self.err(start, "generator index too large"))?;
                    out.push((start, Tok::Gen(j, star)));
                    continue;
                }
                'i' => Tok::Imag(1.0),
                _ if c.is_ascii_digit() || c == '.' => {
                    let x = self.number()?;
                    if self.rest().starts_with('i') {
                        self.pos += 1;
                        out.push((start, Tok::Imag(x)));
                    } else {
                        out.push((start, Tok::Num(x)));
                    }
                    continue;
                }
                other => return self.err(start, format!("unexpected character `{other}`")),
            };
            self.pos += c.len_utf8();
            out.push((start, tok));
        }
        Ok(out)
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

fn fold(e: Expr) -> Expr {
    use Expr::*;
    match e {
        Neg(a) => match *a {
            Num(x) => Num(-x),
            a => Neg(Box::new(a)),
        },
        Add(a, b) => match (*a, *b) {
            (Num(x), Num(y)) => Num(x + y),
            (a, b) => Add(Box::new(a), Box::new(b)),
        },
        Sub(a, b) => match (*a, *b) {
            (Num(x), Num(y)) => Num(x - y),
            (a, b) => Sub(Box::new(a), Box::new(b)),
        },
        Mul(a, b) => match (*a, *b) {
            (Num(x), Num(y)) => Num(x * y),
            (a, b) => Mul(Box::new(a), Box::new(b)),
        },
        e => e,
    }
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.at += 1;
                    lhs = fold(Expr::Add(Box::new(lhs), Box::new(self.term()?)));
                }
                Some(Tok::Minus) => {
                    self.at += 1;
                    lhs = fold(Expr::Sub(Box::new(lhs), Box::new(self.term()?)));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => self.at += 1,
                Some(Tok::Num(_) | Tok::Imag(_) | Tok::Chi(_) | Tok::Delta(_) | Tok::Gen(..) | Tok::LParen) => {}
                _ => return Ok(lhs),
            }
            lhs = fold(Expr::Mul(Box::new(lhs), Box::new(self.factor()?)));
        }
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        let Some(tok) = self.peek().cloned() else {
            return self.err("unexpected end of expression");
        };
        self.at += 1;
        Ok(match tok {
            Tok::Minus => fold(Expr::Neg(Box::new(self.factor()?))),
            Tok::Num(x) => Expr::Num(C::new(x, 0.0)),
            Tok::Imag(y) => Expr::Num(C::new(0.0, y)),
            Tok::Chi(n) => Expr::Chi(n),
            Tok::Delta(n) => Expr::Delta(n),
            Tok::Gen(j, star) => Expr::Gen { j, star },
            Tok::LParen => {
                let e = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.err("expected `)`");
                }
                self.at += 1;
                e
            }
            Tok::RParen | Tok::Plus | Tok::Star => {
                self.at -= 1;
                return self.err("expected a scalar, atom or `(`");
            }
        })
    }
}

pub fn parse(src: &str) -> Result<Expr, ExprError> {
    let toks = Lexer { src, pos: 0 }.tokens()?;
    let mut p = Parser { toks, at: 0, end: src.len() };
    let e = p.expr()?;
    if p.at != p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

fn fmt_num(z: C<f64>) -> String {
    match (z.re, z.im) {
        (re, im) if im == 0.0 => format!("{re}"),
        (re, im) if re == 0.0 => format!("{im}i"),
        (re, im) if im < 0.0 => format!("({re}-{}i)", -im),
        (re, im) => format!("({re}+{im}i)"),
    }
}

impl Expr {
    fn write(&self, f: &mut fmt::Formatter<'_>, level: u8) -> fmt::Result {
        let open = match self {
            Expr::Add(..) | Expr::Sub(..) => level > 0,
            Expr::Mul(..) => level > 1,
            _ => false,
        };
        if open {
            write!(f, "(")?;
        }
        match self {
            Expr::Num(z) => write!(f, "{}", fmt_num(*z))?,
            Expr::Chi(n) => write!(f, "chi[{n}]")?,
            Expr::Delta(n) => write!(f, "delta[{n}]")?,
            Expr::Gen { j, star } => write!(f, "s{j}{}", if *star { "'" } else { "" })?,
            Expr::Neg(a) => {
                write!(f, "-")?;
                a.write(f, 2)?;
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                a.write(f, 0)?;
                write!(f, " {} ", if matches!(self, Expr::Add(..)) { "+" } else { "-" })?;
                b.write(f, 1)?;
            }
            Expr::Mul(a, b) => {
                a.write(f, 1)?;
                write!(f, " * ")?;
                b.write(f, 2)?;
            }
        }
        if open {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

/// Canonical text of `src`.
pub fn normalize(src: &str) -> Result<String, ExprError> {
    Ok(parse(src)?.to_string())
}

/// Named slices available to `chi[..]`.
pub struct GroupoidContext {
    pub groupoid: Arc<FiniteGroupoid>,
    pub slices: BTreeMap<String, Slice>,
}

impl GroupoidContext {
    /// Resolves slice names against the groupoid; unknown arrows fail.
    pub fn new(groupoid: Arc<FiniteGroupoid>, named: &BTreeMap<String, Vec<String>>) -> Result<Self, ExprError> {
        let mut slices = BTreeMap::new();
        for (name, arrows) in named {
            slices.insert(name.clone(), Slice::from_labels(&groupoid, arrows)?);
        }
        Ok(Self { groupoid, slices })
    }

    pub fn eval(&self, e: &Expr) -> Result<AlgebraElement<f64>, ExprError> {
        let g = &self.groupoid;
        Ok(match e {
            Expr::Num(z) => AlgebraElement::unit(g).scale(*z),
            Expr::Chi(name) => {
                let s = self.slices.get(name).ok_or_else(|| ExprError::UnknownName(name.clone()))?;
                AlgebraElement::chi(g, s)
            }
            Expr::Delta(id) => {
                let a = g.find_arrow(id).map_err(|_| ExprError::UnknownName(id.clone()))?;
                AlgebraElement::delta(g, a)
            }
            Expr::Gen { j, .. } => {
                return Err(ExprError::WrongMode(format!("generator s{j} is only meaningful in Leavitt mode")))
            }
            Expr::Neg(a) => self.eval(a)?.scale(C::new(-1.0, 0.0)),
            Expr::Add(a, b) => self.eval(a)?.try_add(&self.eval(b)?)?,
            Expr::Sub(a, b) => self.eval(a)?.try_sub(&self.eval(b)?)?,
            Expr::Mul(a, b) => convolve(&self.eval(a)?, &self.eval(b)?)?,
        })
    }
}

/// Evaluates in the Leavitt algebra on `d` generators.
pub fn eval_leavitt(e: &Expr, d: usize) -> Result<LeavittPolynomial<f64>, ExprError> {
    Ok(match e {
        Expr::Num(z) => LeavittPolynomial::one(d).scale(*z),
        Expr::Gen { j, star } => {
            if *j >= d {
                return Err(ExprError::UnknownName(format!("s{j}")));
            }
            let w = if *star { CuntzWord::s_star(*j) } else { CuntzWord::s(*j) };
            LeavittPolynomial::word(d, w, C::new(1.0, 0.0))?
        }
        Expr::Chi(n) | Expr::Delta(n) => {
            return Err(ExprError::WrongMode(format!("`{n}`: groupoid atoms are not allowed in Leavitt mode")))
        }
        Expr::Neg(a) => eval_leavitt(a, d)?.scale(C::new(-1.0, 0.0)),
        Expr::Add(a, b) => eval_leavitt(a, d)?.add(&eval_leavitt(b, d)?)?,
        Expr::Sub(a, b) => eval_leavitt(a, d)?.add(&eval_leavitt(b, d)?.scale(C::new(-1.0, 0.0)))?,
        Expr::Mul(a, b) => eval_leavitt(a, d)?.mul(&eval_leavitt(b, d)?)?,
    })
}
