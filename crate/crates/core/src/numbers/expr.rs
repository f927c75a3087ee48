//! Textual form of exact numbers: fully parenthesized expressions over
//! rational literals, `+ - * /` and `sqrt`.
//!
//! ```text
//! number := literal | "(" number op number ")" | "sqrt" "(" number ")"
//! literal := ["-"] digits ["/" digits]
//! ```

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::real::{Constructible, View};
use super::{NumError, Rational, Tower};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

/// Syntax tree of an exact number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NumExpr {
    Lit(Rational),
    Bin(BinOp, Box<NumExpr>, Box<NumExpr>),
    Sqrt(Box<NumExpr>),
}

impl NumExpr {
    pub fn lit(q: Rational) -> Self {
        NumExpr::Lit(q)
    }

    pub fn eval(&self, tower: &Tower) -> Result<Constructible, NumError> {
        match self {
            NumExpr::Lit(q) => Ok(Constructible::rational(q.clone())),
            NumExpr::Bin(op, a, b) => {
                let a = a.eval(tower)?;
                let b = b.eval(tower)?;
                Ok(match op {
                    BinOp::Add => &a + &b,
                    BinOp::Sub => &a - &b,
                    BinOp::Mul => &a * &b,
                    BinOp::Div => a.checked_div(&b)?,
                })
            }
            NumExpr::Sqrt(a) => tower.sqrt(&a.eval(tower)?),
        }
    }

    /// Parses a prefix of `s`, returning the expression and the bytes consumed.
    pub fn parse_prefix(s: &str) -> Result<(NumExpr, usize), NumError> {
        let mut p = Parser {
            src: s.as_bytes(),
            pos: 0,
        };
        let e = p.expr()?;
        p.skip_ws();
        Ok((e, p.pos))
    }
}

impl FromStr for NumExpr {
    type Err = NumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (e, used) = NumExpr::parse_prefix(s)?;
        if used != s.len() {
            return Err(NumError::Parse(format!(
                "trailing input at byte {used} in {s:?}"
            )));
        }
        Ok(e)
    }
}

pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for NumExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumExpr::Lit(q) => f.write_str(&format_rational(q)),
            // spaced so it never reads back as a fraction literal
            NumExpr::Bin(BinOp::Div, a, b) => write!(f, "({a} / {b})"),
            NumExpr::Bin(op, a, b) => write!(f, "({}{}{})", a, op.symbol(), b),
            NumExpr::Sqrt(a) => write!(f, "sqrt({a})"),
        }
    }
}

impl Constructible {
    /// Expression tree that evaluates back to this value.
    pub fn to_expr(&self) -> NumExpr {
        match self.view() {
            View::Rational(q) => NumExpr::Lit(q.clone()),
            View::Extension { a, b, radicand, .. } => {
                let root = NumExpr::Sqrt(Box::new(radicand.to_expr()));
                let term = match b.as_rational() {
                    Some(q) if q.is_one() => root,
                    _ => NumExpr::Bin(BinOp::Mul, Box::new(b.to_expr()), Box::new(root)),
                };
                if a.is_structurally_zero() {
                    term
                } else {
                    NumExpr::Bin(BinOp::Add, Box::new(a.to_expr()), Box::new(term))
                }
            }
        }
    }

    /// Accepts an optional trailing `# ...` comment.
    pub fn parse(s: &str, tower: &Tower) -> Result<Constructible, NumError> {
        let s = s.split_once('#').map_or(s, |(e, _)| e);
        s.trim().parse::<NumExpr>()?.eval(tower)
    }

    /// Exact text followed by a decimal approximation comment.
    pub fn to_annotated_string(&self, digits: usize) -> String {
        format!("{self}  # ~{}", self.to_decimal(digits))
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err<T>(&self, msg: &str) -> Result<T, NumError> {
        Err(NumError::Parse(format!("{msg} at byte {}", self.pos)))
    }

    fn expect(&mut self, c: u8) -> Result<(), NumError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(&format!("expected '{}'", c as char))
        }
    }

    fn digits(&mut self) -> Result<BigInt, NumError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(text.parse().unwrap())
    }

    fn literal(&mut self) -> Result<Rational, NumError> {
        let neg = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        self.skip_ws();
        let num = self.digits()?;
        let den = if self.src.get(self.pos) == Some(&b'/')
            && self
                .src
                .get(self.pos + 1)
                .is_some_and(|c| c.is_ascii_digit())
        {
            self.pos += 1;
            self.digits()?
        } else {
            BigInt::one()
        };
        if den.is_zero() {
            return self.err("zero denominator");
        }
        let q = Rational::new(num, den);
        Ok(if neg { -q } else { q })
    }

    fn expr(&mut self) -> Result<NumExpr, NumError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let a = self.expr()?;
                let op = match self.peek() {
                    Some(b'+') => BinOp::Add,
                    Some(b'-') => BinOp::Sub,
                    Some(b'*') => BinOp::Mul,
                    Some(b'/') => BinOp::Div,
                    Some(b')') => {
                        self.pos += 1;
                        return Ok(a);
                    }
                    _ => return self.err("expected operator"),
                };
                self.pos += 1;
                let b = self.expr()?;
                self.expect(b')')?;
                Ok(NumExpr::Bin(op, Box::new(a), Box::new(b)))
            }
            Some(b's') => {
                if self.src[self.pos..].starts_with(b"sqrt") {
                    self.pos += 4;
                    self.expect(b'(')?;
                    let a = self.expr()?;
                    self.expect(b')')?;
                    Ok(NumExpr::Sqrt(Box::new(a)))
                } else {
                    self.err("unknown word")
                }
            }
            Some(c) if c == b'-' || c.is_ascii_digit() => Ok(NumExpr::Lit(self.literal()?)),
            _ => self.err("expected number"),
        }
    }
}
