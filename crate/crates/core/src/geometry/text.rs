//! Text form of geometric objects:
//!
//! ```text
//! point [x:y:z]
//! line [a:b:c]
//! conic [m11 m12 m13; m22 m23; m33]
//! map [a b c; d e f; g h i]
//! ```

use std::fmt;

use crate::numbers::{Constructible, NumExpr, Tower};

use super::{Conic, GeomError, GeomObject, HLine, HPoint, ProjMap};

impl fmt::Display for HPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y, z] = &self.0;
        write!(f, "point [{x}:{y}:{z}]")
    }
}

impl fmt::Display for HLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = &self.0;
        write!(f, "line [{a}:{b}:{c}]")
    }
}

impl fmt::Display for Conic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d, e, g] = &self.0;
        write!(f, "conic [{a} {b} {c}; {d} {e}; {g}]")
    }
}

impl fmt::Display for GeomObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeomObject::Point(p) => p.fmt(f),
            GeomObject::Line(l) => l.fmt(f),
            GeomObject::Conic(c) => c.fmt(f),
        }
    }
}

impl fmt::Display for ProjMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .matrix()
            .iter()
            .map(|r| format!("{} {} {}", r[0], r[1], r[2]))
            .collect();
        write!(f, "map [{}]", rows.join("; "))
    }
}

/// Reads a bracketed list of numbers with the given separators between
/// consecutive entries.
fn numbers(body: &str, seps: &[char], tower: &Tower) -> Result<Vec<Constructible>, GeomError> {
    let body = body.trim();
    let inner = body
        .strip_prefix('[')
        .and_then(|b| b.strip_suffix(']'))
        .ok_or_else(|| GeomError::Parse(format!("expected [...] in {body:?}")))?;
    let mut out = Vec::with_capacity(seps.len() + 1);
    let mut rest = inner;
    for i in 0..=seps.len() {
        let (expr, used) = NumExpr::parse_prefix(rest)?;
        out.push(expr.eval(tower)?);
        rest = rest[used..].trim_start();
        if i < seps.len() && seps[i] != ' ' {
            rest = rest.strip_prefix(seps[i]).ok_or_else(|| {
                GeomError::Parse(format!("expected '{}' before {rest:?}", seps[i]))
            })?;
        }
    }
    if !rest.trim().is_empty() {
        return Err(GeomError::Parse(format!("trailing input {rest:?}")));
    }
    Ok(out)
}

impl GeomObject {
    pub fn parse(s: &str, tower: &Tower) -> Result<GeomObject, GeomError> {
        let s = s.trim();
        let (word, body) = s.split_once(' ').unwrap_or((s, ""));
        let three = |v: Vec<Constructible>| -> [Constructible; 3] { v.try_into().ok().unwrap() };
        match word {
            "point" => {
                let [x, y, z] = three(numbers(body, &[':', ':'], tower)?);
                Ok(HPoint::new(x, y, z)?.into())
            }
            "line" => {
                let [a, b, c] = three(numbers(body, &[':', ':'], tower)?);
                Ok(HLine::new(a, b, c)?.into())
            }
            "conic" => {
                let v = numbers(body, &[' ', ' ', ';', ' ', ';'], tower)?;
                Ok(Conic::from_upper(v.try_into().ok().unwrap())?.into())
            }
            _ => Err(GeomError::Parse(format!("unknown object kind {word:?}"))),
        }
    }
}

impl ProjMap {
    pub fn parse(s: &str, tower: &Tower) -> Result<ProjMap, GeomError> {
        let body = s
            .trim()
            .strip_prefix("map ")
            .ok_or_else(|| GeomError::Parse(format!("expected map [...] in {s:?}")))?;
        let v = numbers(body, &[' ', ' ', ';', ' ', ' ', ';', ' ', ' '], tower)?;
        let mut it = v.into_iter();
        let m = std::array::from_fn(|_| std::array::from_fn(|_| it.next().unwrap()));
        ProjMap::new(m)
    }
}
