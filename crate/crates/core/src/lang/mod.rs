//! Strategy scripts: the construction steps, tests and point requests a
//! player may issue, as a small bounded-loop language.
//!
//! ```text
//! given A, B;
//! let l = join(A, B);
//! request P in disc((0, 0), 1/10) and halfplane(l, +);
//! if incident(P, l) { output P; }
//! ```

mod check;
mod lexer;
mod parser;
mod print;

pub use check::{check, Diagnostic, Severity, Type};
pub use parser::{parse, ParseError};
pub use print::pretty_print;

use crate::numbers::{NumExpr, Rational};

/// Source position, 1-based. Positions never affect AST equality.
#[derive(Clone, Copy, Debug, Default, Eq)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl PartialEq for Span {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl std::fmt::Display for Span {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

impl Ident {
    pub fn new(name: impl Into<String>) -> Self {
        Ident {
            name: name.into(),
            span: Span::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Script {
    pub givens: Vec<Ident>,
    pub body: Vec<Stmt>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Join(Ident, Ident),
    Meet(Ident, Ident),
    /// Intersection points of two curves in labeling order; `index` picks
    /// one of them.
    Intersect {
        a: Ident,
        b: Ident,
        index: Option<u8>,
    },
    Circle(Ident, Ident, Ident),
}

impl Expr {
    pub fn operands(&self) -> Vec<&Ident> {
        match self {
            Expr::Join(a, b) | Expr::Meet(a, b) | Expr::Intersect { a, b, .. } => vec![a, b],
            Expr::Circle(a, b, c) => vec![a, b, c],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Test {
    Incident(Ident, Ident),
    Equal(Ident, Ident),
    Parallel(Ident, Ident),
    /// The second point lies strictly between the other two.
    Between(Ident, Ident, Ident),
    SameSide(Ident, Ident, Ident),
}

impl Test {
    pub fn name(&self) -> &'static str {
        match self {
            Test::Incident(..) => "incident",
            Test::Equal(..) => "equal",
            Test::Parallel(..) => "parallel",
            Test::Between(..) => "between",
            Test::SameSide(..) => "sameside",
        }
    }

    pub fn operands(&self) -> Vec<&Ident> {
        match self {
            Test::Incident(a, b) | Test::Equal(a, b) | Test::Parallel(a, b) => vec![a, b],
            Test::Between(a, b, c) | Test::SameSide(a, b, c) => vec![a, b, c],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PointLit {
    Coords(NumExpr, NumExpr),
    Name(Ident),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetAtom {
    Disc {
        center: PointLit,
        radius: Rational,
    },
    /// Strict side of a line `a·x + b·y + c` with the given sign.
    HalfPlane {
        line: Ident,
        positive: bool,
    },
}

/// Finite intersection of open discs and open half-planes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenSetExpr {
    pub atoms: Vec<SetAtom>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stmt {
    /// `let P = ...;` or, for intersections, `let P, Q = ...;`.
    Let {
        names: Vec<Ident>,
        expr: Expr,
        span: Span,
    },
    Request {
        name: Ident,
        set: OpenSetExpr,
        span: Span,
    },
    If {
        test: Test,
        then_block: Vec<Stmt>,
        else_block: Option<Vec<Stmt>>,
        span: Span,
    },
    Repeat {
        count: u64,
        body: Vec<Stmt>,
        span: Span,
    },
    Output {
        name: Ident,
        span: Span,
    },
    Assert {
        test: Test,
        span: Span,
    },
}

impl Stmt {
    pub fn span(&self) -> Span {
        match self {
            Stmt::Let { span, .. }
            | Stmt::Request { span, .. }
            | Stmt::If { span, .. }
            | Stmt::Repeat { span, .. }
            | Stmt::Output { span, .. }
            | Stmt::Assert { span, .. } => *span,
        }
    }
}

impl Script {
    /// Every test in source order, including those nested in blocks.
    pub fn tests(&self) -> Vec<&Test> {
        fn walk<'a>(stmts: &'a [Stmt], out: &mut Vec<&'a Test>) {
            for s in stmts {
                match s {
                    Stmt::If {
                        test,
                        then_block,
                        else_block,
                        ..
                    } => {
                        out.push(test);
                        walk(then_block, out);
                        if let Some(b) = else_block {
                            walk(b, out);
                        }
                    }
                    Stmt::Assert { test, .. } => out.push(test),
                    Stmt::Repeat { body, .. } => walk(body, out),
                    _ => {}
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.body, &mut out);
        out
    }
}
