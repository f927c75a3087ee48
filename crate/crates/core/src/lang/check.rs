use std::collections::HashMap;
use std::fmt;

use crate::closure::Configuration;
use crate::geometry::ObjectKind;

use super::{Expr, Ident, OpenSetExpr, PointLit, Script, SetAtom, Span, Stmt, Test};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Type {
    Point,
    Line,
    Conic,
    /// A given whose kind is not known without inputs.
    Unknown,
}

impl Type {
    fn of_kind(k: ObjectKind) -> Type {
        match k {
            ObjectKind::Point => Type::Point,
            ObjectKind::Line => Type::Line,
            ObjectKind::Conic => Type::Conic,
        }
    }

    fn fits(self, want: Type) -> bool {
        self == Type::Unknown || self == want
    }

    fn is_curve(self) -> bool {
        matches!(self, Type::Line | Type::Conic | Type::Unknown)
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Type::Point => "point",
            Type::Line => "line",
            Type::Conic => "conic",
            Type::Unknown => "object",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    pub span: Span,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}: {sev}: {}", self.span, self.message)
    }
}

struct Checker {
    scopes: Vec<HashMap<String, Type>>,
    out: Vec<Diagnostic>,
}

impl Checker {
    fn error(&mut self, span: Span, message: String) {
        self.out.push(Diagnostic {
            severity: Severity::Error,
            message,
            span,
        });
    }

    fn lookup(&mut self, id: &Ident) -> Option<Type> {
        let found = self
            .scopes
            .iter()
            .rev()
            .find_map(|s| s.get(&id.name))
            .copied();
        if found.is_none() {
            self.error(id.span, format!("undefined identifier '{}'", id.name));
        }
        found
    }

    fn expect(&mut self, id: &Ident, want: Type) {
        if let Some(t) = self.lookup(id) {
            if !t.fits(want) {
                self.error(
                    id.span,
                    format!("'{}' is a {t}, expected a {want}", id.name),
                );
            }
        }
    }

    fn expect_curve(&mut self, id: &Ident) -> Option<Type> {
        let t = self.lookup(id)?;
        if !t.is_curve() {
            self.error(
                id.span,
                format!("'{}' is a {t}, expected a line or conic", id.name),
            );
        }
        Some(t)
    }

    fn bind(&mut self, id: &Ident, t: Type) {
        if self.scopes.iter().any(|s| s.contains_key(&id.name)) {
            self.error(id.span, format!("'{}' is already defined", id.name));
            return;
        }
        self.scopes.last_mut().unwrap().insert(id.name.clone(), t);
    }

    fn expr(&mut self, names: &[Ident], e: &Expr) -> Type {
        match e {
            Expr::Join(p, q) => {
                self.expect(p, Type::Point);
                self.expect(q, Type::Point);
                Type::Line
            }
            Expr::Meet(l, m) => {
                self.expect(l, Type::Line);
                self.expect(m, Type::Line);
                Type::Point
            }
            Expr::Circle(c, a, b) => {
                for p in [c, a, b] {
                    self.expect(p, Type::Point);
                }
                Type::Conic
            }
            Expr::Intersect { a, b, .. } => {
                let ta = self.expect_curve(a);
                let tb = self.expect_curve(b);
                if ta == Some(Type::Line) && tb == Some(Type::Line) && names.len() == 2 {
                    self.error(
                        names[1].span,
                        "two lines meet in one point; bind a single name".into(),
                    );
                }
                Type::Point
            }
        }
    }

    fn test(&mut self, t: &Test) {
        match t {
            Test::Incident(p, c) => {
                self.expect(p, Type::Point);
                self.expect_curve(c);
            }
            Test::Equal(a, b) => {
                if let (Some(ta), Some(tb)) = (self.lookup(a), self.lookup(b)) {
                    if !(ta.fits(tb) || tb.fits(ta)) {
                        self.error(b.span, format!("cannot compare a {ta} with a {tb}"));
                    }
                }
            }
            Test::Parallel(l, m) => {
                self.expect(l, Type::Line);
                self.expect(m, Type::Line);
            }
            Test::Between(p, q, r) => {
                for x in [p, q, r] {
                    self.expect(x, Type::Point);
                }
            }
            Test::SameSide(p, q, l) => {
                self.expect(p, Type::Point);
                self.expect(q, Type::Point);
                self.expect(l, Type::Line);
            }
        }
    }

    fn openset(&mut self, set: &OpenSetExpr) {
        for atom in &set.atoms {
            match atom {
                SetAtom::Disc {
                    center: PointLit::Name(c),
                    ..
                } => self.expect(c, Type::Point),
                SetAtom::Disc { .. } => {}
                SetAtom::HalfPlane { line, .. } => self.expect(line, Type::Line),
            }
        }
    }

    fn block(&mut self, stmts: &[Stmt]) {
        self.scopes.push(HashMap::new());
        self.stmts(stmts);
        self.scopes.pop();
    }

    fn stmts(&mut self, stmts: &[Stmt]) {
        for s in stmts {
            match s {
                Stmt::Let { names, expr, .. } => {
                    let t = self.expr(names, expr);
                    for n in names {
                        self.bind(n, t);
                    }
                }
                Stmt::Request { name, set, span } => {
                    if !set.atoms.iter().any(|a| matches!(a, SetAtom::Disc { .. })) {
                        self.error(*span, "an open set needs at least one disc".into());
                    }
                    self.openset(set);
                    self.bind(name, Type::Point);
                }
                Stmt::If {
                    test,
                    then_block,
                    else_block,
                    ..
                } => {
                    self.test(test);
                    self.block(then_block);
                    if let Some(b) = else_block {
                        self.block(b);
                    }
                }
                Stmt::Repeat { count, body, span } => {
                    if *count == 0 {
                        self.out.push(Diagnostic {
                            severity: Severity::Warning,
                            message: "repeat 0: dead block".into(),
                            span: *span,
                        });
                    }
                    self.block(body);
                }
                Stmt::Output { name, .. } => {
                    self.lookup(name);
                }
                Stmt::Assert { test, .. } => self.test(test),
            }
        }
    }
}

/// Static checks: name resolution, operand kinds and given arity. With
/// `inputs`, the givens take the kinds of the input objects in order.
pub fn check(script: &Script, inputs: Option<&Configuration>) -> Vec<Diagnostic> {
    let mut c = Checker {
        scopes: vec![HashMap::new()],
        out: Vec::new(),
    };
    if let Some(cfg) = inputs {
        if cfg.len() != script.givens.len() {
            c.error(
                script
                    .givens
                    .first()
                    .map_or(Span { line: 1, col: 1 }, |g| g.span),
                format!(
                    "script declares {} givens but {} inputs were supplied",
                    script.givens.len(),
                    cfg.len()
                ),
            );
        }
    }
    for (i, g) in script.givens.iter().enumerate() {
        let t = inputs
            .and_then(|cfg| cfg.entries().get(i))
            .map_or(Type::Unknown, |e| Type::of_kind(e.object.kind()));
        c.bind(g, t);
    }
    c.stmts(&script.body);
    c.out
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    fn diags(src: &str) -> Vec<Diagnostic> {
        check(&parse(src).unwrap(), None)
    }

    #[test]
    fn clean_script() {
        assert!(diags("given A, B; let l = join(A, B); request P in disc(A, 1/2) and halfplane(l, +); output P;").is_empty());
    }

    #[test]
    fn unbounded_request() {
        let d = diags("given A, B; let l = join(A, B); request P in halfplane(l, +);");
        assert_eq!(d.len(), 1);
        assert!(d[0].message.contains("disc"));
    }

    #[test]
    fn undefined_name() {
        let d = diags("given A, B; let l = join(A, C);");
        assert_eq!(d.len(), 1);
        assert!(d[0].message.contains("'C'"));
    }

    #[test]
    fn dead_repeat_warns() {
        let d = diags("given A; repeat 0 { output A; }");
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].severity, Severity::Warning);
    }

    #[test]
    fn types_and_scopes() {
        let d = diags("given A, B; let l = join(A, B); let m = join(l, A);");
        assert_eq!(d.len(), 1);
        let d = diags("given A, B; if equal(A, B) { let l = join(A, B); } output l;");
        assert_eq!(d.len(), 1);
        let d = diags("given A, B; let A = join(A, B);");
        assert_eq!(d.len(), 1);
    }
}
