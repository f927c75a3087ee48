use std::fmt;

use num_traits::Signed;

use crate::numbers::NumExpr;

use super::lexer::{Lexer, Tok, Token};
use super::{Expr, Ident, OpenSetExpr, PointLit, Script, SetAtom, Span, Stmt, Test};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub message: String,
    pub line: u32,
    pub col: u32,
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(" or "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

const KEYWORDS: &[&str] = &[
    "given",
    "let",
    "request",
    "in",
    "if",
    "else",
    "repeat",
    "output",
    "assert",
    "and",
    "join",
    "meet",
    "intersect",
    "circle",
    "incident",
    "equal",
    "parallel",
    "between",
    "sameside",
    "disc",
    "halfplane",
];

const STMT_START: &[&str] = &["let", "request", "if", "repeat", "output", "assert"];

type PResult<T> = Result<T, ParseError>;

struct Parser<'a> {
    lex: Lexer<'a>,
    cur: Token,
    prev_end: usize,
    errors: Vec<ParseError>,
}

/// Parses a script, reporting every syntax error found (the parser resumes
/// at the next statement boundary after an error).
pub fn parse(src: &str) -> Result<Script, Vec<ParseError>> {
    let mut lex = Lexer::new(src);
    let cur = lex.next_token();
    let mut p = Parser {
        lex,
        cur,
        prev_end: 0,
        errors: Vec::new(),
    };
    let script = p.script();
    if p.errors.is_empty() {
        Ok(script)
    } else {
        Err(p.errors)
    }
}

impl Parser<'_> {
    fn bump(&mut self) -> Token {
        let next = self.lex.next_token();
        self.prev_end = self.cur.end;
        std::mem::replace(&mut self.cur, next)
    }

    fn span(&self, byte: usize) -> Span {
        self.lex.span_at(byte)
    }

    fn error_at(&self, byte: usize, message: impl Into<String>, expected: &[&str]) -> ParseError {
        let s = self.span(byte);
        ParseError {
            message: message.into(),
            line: s.line,
            col: s.col,
            expected: expected.iter().map(|e| e.to_string()).collect(),
        }
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        self.error_at(
            self.cur.start,
            format!("unexpected {}", self.cur.tok.describe()),
            expected,
        )
    }

    fn at_punct(&self, c: char) -> bool {
        self.cur.tok == Tok::Punct(c)
    }

    fn at_kw(&self, kw: &str) -> bool {
        matches!(&self.cur.tok, Tok::Ident(s) if s == kw)
    }

    fn expect_punct(&mut self, c: char) -> PResult<Token> {
        if self.at_punct(c) {
            return Ok(self.bump());
        }
        let want = format!("'{c}'");
        if c == ';' {
            // a missing terminator belongs to the statement just read
            return Err(self.error_at(
                self.prev_end,
                format!("missing ';' before {}", self.cur.tok.describe()),
                &[&want],
            ));
        }
        Err(self.unexpected(&[&want]))
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<Token> {
        if self.at_kw(kw) {
            return Ok(self.bump());
        }
        Err(self.unexpected(&[&format!("'{kw}'")]))
    }

    fn ident(&mut self) -> PResult<Ident> {
        match &self.cur.tok {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let name = s.clone();
                let t = self.bump();
                Ok(Ident {
                    name,
                    span: self.span(t.start),
                })
            }
            Tok::Ident(s) => Err(self.error_at(
                self.cur.start,
                format!("'{s}' is a keyword, not a name"),
                &["identifier"],
            )),
            _ => Err(self.unexpected(&["identifier"])),
        }
    }

    fn recover(&mut self, stmt_start: usize) {
        loop {
            match &self.cur.tok {
                Tok::Eof => return,
                Tok::Punct(';') => {
                    self.bump();
                    return;
                }
                Tok::Punct('}') => return,
                Tok::Ident(s)
                    if STMT_START.contains(&s.as_str()) && self.cur.start > stmt_start =>
                {
                    return
                }
                _ => {
                    self.bump();
                }
            }
        }
    }

    fn script(&mut self) -> Script {
        let mut givens = Vec::new();
        let start = self.cur.start;
        let header = (|| -> PResult<()> {
            self.expect_kw("given")?;
            if !self.at_punct(';') {
                givens.push(self.ident()?);
                while self.at_punct(',') {
                    self.bump();
                    givens.push(self.ident()?);
                }
            }
            self.expect_punct(';')?;
            Ok(())
        })();
        if let Err(e) = header {
            self.errors.push(e);
            self.recover(start);
        }
        let mut body = Vec::new();
        loop {
            body.extend(self.block_items());
            match self.cur.tok {
                Tok::Eof => break,
                _ => {
                    // stray closing brace at top level
                    let e = self.unexpected(&["statement"]);
                    self.errors.push(e);
                    self.bump();
                }
            }
        }
        Script { givens, body }
    }

    /// Statements up to a closing brace or end of input.
    fn block_items(&mut self) -> Vec<Stmt> {
        let mut out = Vec::new();
        while !matches!(self.cur.tok, Tok::Eof | Tok::Punct('}')) {
            let start = self.cur.start;
            match self.stmt() {
                Ok(s) => out.push(s),
                Err(e) => {
                    self.errors.push(e);
                    self.recover(start);
                }
            }
        }
        out
    }

    fn block(&mut self) -> PResult<Vec<Stmt>> {
        self.expect_punct('{')?;
        let body = self.block_items();
        if !self.at_punct('}') {
            return Err(self.unexpected(&["'}'"]));
        }
        self.bump();
        Ok(body)
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let span = self.span(self.cur.start);
        let kw = match &self.cur.tok {
            Tok::Ident(s) if STMT_START.contains(&s.as_str()) => s.clone(),
            _ => return Err(self.unexpected(STMT_START)),
        };
        self.bump();
        match kw.as_str() {
            "let" => {
                let mut names = vec![self.ident()?];
                if self.at_punct(',') {
                    self.bump();
                    names.push(self.ident()?);
                }
                self.expect_punct('=')?;
                let expr_start = self.cur.start;
                let expr = self.expr()?;
                if names.len() == 2 && !matches!(expr, Expr::Intersect { index: None, .. }) {
                    return Err(self.error_at(
                        expr_start,
                        "two names can only be bound to an unindexed intersect(...)",
                        &[],
                    ));
                }
                self.expect_punct(';')?;
                Ok(Stmt::Let { names, expr, span })
            }
            "request" => {
                let name = self.ident()?;
                self.expect_kw("in")?;
                let set = self.openset()?;
                self.expect_punct(';')?;
                Ok(Stmt::Request { name, set, span })
            }
            "if" => {
                let test = self.test()?;
                let then_block = self.block()?;
                let else_block = if self.at_kw("else") {
                    self.bump();
                    Some(self.block()?)
                } else {
                    None
                };
                Ok(Stmt::If {
                    test,
                    then_block,
                    else_block,
                    span,
                })
            }
            "repeat" => {
                let count = match self.cur.tok {
                    Tok::Nat(n) => {
                        self.bump();
                        n
                    }
                    _ => {
                        return Err(self.error_at(
                            self.cur.start,
                            "loop bound must be a literal natural number",
                            &["natural number"],
                        ))
                    }
                };
                let body = self.block()?;
                Ok(Stmt::Repeat { count, body, span })
            }
            "output" => {
                let name = self.ident()?;
                self.expect_punct(';')?;
                Ok(Stmt::Output { name, span })
            }
            _ => {
                let test = self.test()?;
                self.expect_punct(';')?;
                Ok(Stmt::Assert { test, span })
            }
        }
    }

    /// `name(id, id, ...)` with the arity checked at the call site.
    fn call(
        &mut self,
        names: &[(&str, usize)],
        what: &str,
    ) -> PResult<(String, Vec<Ident>, usize)> {
        let start = self.cur.start;
        let (name, arity) = match &self.cur.tok {
            Tok::Ident(s) => match names.iter().find(|(n, _)| n == s) {
                Some(&(n, a)) => (n.to_string(), a),
                None => {
                    let exp: Vec<&str> = names.iter().map(|(n, _)| *n).collect();
                    return Err(self.error_at(start, format!("unknown {what} '{s}'"), &exp));
                }
            },
            _ => {
                let exp: Vec<&str> = names.iter().map(|(n, _)| *n).collect();
                return Err(self.unexpected(&exp));
            }
        };
        self.bump();
        self.expect_punct('(')?;
        let mut args = Vec::new();
        if !self.at_punct(')') {
            args.push(self.ident()?);
            while self.at_punct(',') {
                self.bump();
                args.push(self.ident()?);
            }
        }
        if !self.at_punct(')') {
            return Err(self.unexpected(&["','", "')'"]));
        }
        self.bump();
        if args.len() != arity {
            return Err(self.error_at(
                start,
                format!("{name} takes {arity} arguments, found {}", args.len()),
                &[],
            ));
        }
        Ok((name, args, start))
    }

    fn expr(&mut self) -> PResult<Expr> {
        let (name, args, _) = self.call(
            &[("join", 2), ("meet", 2), ("intersect", 2), ("circle", 3)],
            "construction",
        )?;
        let mut a = args.into_iter();
        let mut next = || a.next().unwrap();
        Ok(match name.as_str() {
            "join" => Expr::Join(next(), next()),
            "meet" => Expr::Meet(next(), next()),
            "circle" => Expr::Circle(next(), next(), next()),
            _ => {
                let (a, b) = (next(), next());
                let index = if self.at_punct('[') {
                    self.bump();
                    let i = match self.cur.tok {
                        Tok::Nat(n @ (0 | 1)) => n as u8,
                        _ => {
                            return Err(self.error_at(
                                self.cur.start,
                                "intersection index must be 0 or 1",
                                &["0", "1"],
                            ))
                        }
                    };
                    self.bump();
                    self.expect_punct(']')?;
                    Some(i)
                } else {
                    None
                };
                Expr::Intersect { a, b, index }
            }
        })
    }

    fn test(&mut self) -> PResult<Test> {
        let (name, args, _) = self.call(
            &[
                ("incident", 2),
                ("equal", 2),
                ("parallel", 2),
                ("between", 3),
                ("sameside", 3),
            ],
            "test",
        )?;
        let mut a = args.into_iter();
        let mut next = || a.next().unwrap();
        Ok(match name.as_str() {
            "incident" => Test::Incident(next(), next()),
            "equal" => Test::Equal(next(), next()),
            "parallel" => Test::Parallel(next(), next()),
            "between" => Test::Between(next(), next(), next()),
            _ => Test::SameSide(next(), next(), next()),
        })
    }

    fn openset(&mut self) -> PResult<OpenSetExpr> {
        let mut atoms = vec![self.atom()?];
        while self.at_kw("and") {
            self.bump();
            atoms.push(self.atom()?);
        }
        Ok(OpenSetExpr { atoms })
    }

    fn atom(&mut self) -> PResult<SetAtom> {
        if self.at_kw("disc") {
            self.bump();
            self.expect_punct('(')?;
            let center = if self.at_punct('(') {
                self.bump();
                let x = self.number()?;
                self.expect_punct(',')?;
                let y = self.number()?;
                self.expect_punct(')')?;
                PointLit::Coords(x, y)
            } else {
                PointLit::Name(self.ident()?)
            };
            self.expect_punct(',')?;
            let at = self.cur.start;
            let radius = match self.number()? {
                NumExpr::Lit(q) if q.is_positive() => q,
                _ => {
                    return Err(self.error_at(
                        at,
                        "disc radius must be a positive rational literal",
                        &[],
                    ))
                }
            };
            self.expect_punct(')')?;
            Ok(SetAtom::Disc { center, radius })
        } else if self.at_kw("halfplane") {
            self.bump();
            self.expect_punct('(')?;
            let line = self.ident()?;
            self.expect_punct(',')?;
            let positive = match self.cur.tok {
                Tok::Punct('+') => true,
                Tok::Punct('-') => false,
                _ => return Err(self.unexpected(&["'+'", "'-'"])),
            };
            self.bump();
            self.expect_punct(')')?;
            Ok(SetAtom::HalfPlane { line, positive })
        } else {
            Err(self.unexpected(&["disc", "halfplane"]))
        }
    }

    /// Exact number read directly from the source text.
    fn number(&mut self) -> PResult<NumExpr> {
        let start = self.cur.start;
        match NumExpr::parse_prefix(&self.lex.src[start..]) {
            Ok((e, used)) => {
                let end = start + self.lex.src[start..start + used].trim_end().len();
                self.lex.pos = end;
                self.cur = self.lex.next_token();
                self.prev_end = end;
                Ok(e)
            }
            Err(err) => Err(self.error_at(start, format!("bad number: {err}"), &["number"])),
        }
    }
}
