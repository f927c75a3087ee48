use std::fmt::Write;

use crate::numbers::format_rational;

use super::{Expr, Ident, OpenSetExpr, PointLit, Script, SetAtom, Stmt, Test};

fn names(ids: &[&Ident]) -> String {
    ids.iter()
        .map(|i| i.name.as_str())
        .collect::<Vec<_>>()
        .join(", ")
}

pub(crate) fn expr_text(e: &Expr) -> String {
    let head = match e {
        Expr::Join(..) => "join",
        Expr::Meet(..) => "meet",
        Expr::Intersect { .. } => "intersect",
        Expr::Circle(..) => "circle",
    };
    let mut s = format!("{head}({})", names(&e.operands()));
    if let Expr::Intersect { index: Some(i), .. } = e {
        write!(s, "[{i}]").unwrap();
    }
    s
}

pub(crate) fn test_text(t: &Test) -> String {
    format!("{}({})", t.name(), names(&t.operands()))
}

pub(crate) fn openset_text(set: &OpenSetExpr) -> String {
    set.atoms
        .iter()
        .map(|a| match a {
            SetAtom::Disc { center, radius } => {
                let c = match center {
                    PointLit::Coords(x, y) => format!("({x}, {y})"),
                    PointLit::Name(id) => id.name.clone(),
                };
                format!("disc({c}, {})", format_rational(radius))
            }
            SetAtom::HalfPlane { line, positive } => {
                format!(
                    "halfplane({}, {})",
                    line.name,
                    if *positive { '+' } else { '-' }
                )
            }
        })
        .collect::<Vec<_>>()
        .join(" and ")
}

fn block(out: &mut String, stmts: &[Stmt], depth: usize) {
    for s in stmts {
        stmt(out, s, depth);
    }
}

fn braced(out: &mut String, stmts: &[Stmt], depth: usize) {
    if stmts.is_empty() {
        out.push_str("{ }");
        return;
    }
    out.push_str("{\n");
    block(out, stmts, depth + 1);
    out.push_str(&"  ".repeat(depth));
    out.push('}');
}

fn stmt(out: &mut String, s: &Stmt, depth: usize) {
    out.push_str(&"  ".repeat(depth));
    match s {
        Stmt::Let { names: n, expr, .. } => {
            let n: Vec<&Ident> = n.iter().collect();
            writeln!(out, "let {} = {};", names(&n), expr_text(expr)).unwrap();
        }
        Stmt::Request { name, set, .. } => {
            writeln!(out, "request {} in {};", name.name, openset_text(set)).unwrap();
        }
        Stmt::If {
            test,
            then_block,
            else_block,
            ..
        } => {
            write!(out, "if {} ", test_text(test)).unwrap();
            braced(out, then_block, depth);
            if let Some(e) = else_block {
                out.push_str(" else ");
                braced(out, e, depth);
            }
            out.push('\n');
        }
        Stmt::Repeat { count, body, .. } => {
            write!(out, "repeat {count} ").unwrap();
            braced(out, body, depth);
            out.push('\n');
        }
        Stmt::Output { name, .. } => writeln!(out, "output {};", name.name).unwrap(),
        Stmt::Assert { test, .. } => writeln!(out, "assert {};", test_text(test)).unwrap(),
    }
}

/// Canonical text of a script: two-space indentation, one statement per line.
pub fn pretty_print(script: &Script) -> String {
    let mut out = String::from("given");
    if !script.givens.is_empty() {
        let g: Vec<&Ident> = script.givens.iter().collect();
        write!(out, " {}", names(&g)).unwrap();
    }
    out.push_str(";\n");
    block(&mut out, &script.body, 0);
    out
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    #[test]
    fn empty_script_is_header_only() {
        let s = parse("given;").unwrap();
        assert_eq!(pretty_print(&s), "given;\n");
    }

    #[test]
    fn nested_blocks_indent() {
        let src = "given A,B; let l=join(A,B); repeat 2 { request P in disc((0,-1/2),1/10); if incident(P,l) { output P; } else { } }";
        let s = parse(src).unwrap();
        let text = pretty_print(&s);
        assert_eq!(
            text,
            "given A, B;\nlet l = join(A, B);\nrepeat 2 {\n  request P in disc((0, -1/2), 1/10);\n  if incident(P, l) {\n    output P;\n  } else { }\n}\n"
        );
        assert_eq!(parse(&text).unwrap(), s);
    }
}
