//! Line-oriented configuration files.
//!
//! ```text
//! rulerlab-config 1
//! tower 1
//! 2
//! objects 3 closed 0
//! point [0:0:1]
//! point [1:0:1]
//! line [0:1:0]
//! provenance
//! 0 given @0
//! 1 given @0
//! 2 join 0 1 #0 @1
//! end
//! ```
//!
//! The tower block lists level radicands in creation order so a reloaded
//! configuration has exactly the same internal representation.

use std::sync::Arc;

use crate::geometry::GeomObject;
use crate::numbers::{Constructible, Tower};

use super::{ClosureError, Configuration, Op, Provenance};

const HEADER: &str = "rulerlab-config 1";

/// Cursor over the non-empty, non-comment lines of a text file.
pub(crate) struct Lines<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with("//"))
            .collect();
        Lines { lines, pos: 0 }
    }

    pub(crate) fn line_no(&self) -> usize {
        self.lines
            .get(self.pos)
            .or(self.lines.last())
            .map_or(0, |l| l.0)
    }

    pub(crate) fn err<T>(&self, msg: impl Into<String>) -> Result<T, ClosureError> {
        Err(ClosureError::Parse {
            line: self.line_no(),
            msg: msg.into(),
        })
    }

    pub(crate) fn next(&mut self) -> Result<&'a str, ClosureError> {
        match self.lines.get(self.pos) {
            Some(&(_, l)) => {
                self.pos += 1;
                Ok(l)
            }
            None => self.err("unexpected end of file"),
        }
    }

    pub(crate) fn expect(&mut self, want: &str) -> Result<(), ClosureError> {
        let got = self.next()?;
        if got != want {
            self.pos -= 1;
            return self.err(format!("expected {want:?}, found {got:?}"));
        }
        Ok(())
    }

    /// Reads `<keyword> <n> [rest...]`, returning `n` and the remaining words.
    pub(crate) fn counted(&mut self, keyword: &str) -> Result<(usize, Vec<&'a str>), ClosureError> {
        let line = self.next()?;
        let mut words = line.split_whitespace();
        if words.next() != Some(keyword) {
            self.pos -= 1;
            return self.err(format!("expected {keyword:?} block"));
        }
        let n = match words.next().and_then(|w| w.parse().ok()) {
            Some(n) => n,
            None => return self.err(format!("{keyword} needs a count")),
        };
        Ok((n, words.collect()))
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.lines.len()
    }
}

pub(crate) fn write_tower(tower: &Tower, out: &mut String) {
    let radicands = tower.radicands();
    out.push_str(&format!("tower {}\n", radicands.len()));
    for r in radicands {
        out.push_str(&r.to_string());
        out.push('\n');
    }
}

pub(crate) fn read_tower(lines: &mut Lines<'_>) -> Result<Arc<Tower>, ClosureError> {
    let (n, _) = lines.counted("tower")?;
    let tower = Tower::new();
    for _ in 0..n {
        let text = lines.next()?;
        let r = match Constructible::parse(text, &tower) {
            Ok(r) => r,
            Err(e) => return lines.err(e.to_string()),
        };
        if let Err(e) = tower.push_level(&r) {
            return lines.err(e.to_string());
        }
    }
    Ok(Arc::new(tower))
}

pub(crate) fn read_object(
    lines: &mut Lines<'_>,
    tower: &Tower,
) -> Result<GeomObject, ClosureError> {
    let text = lines.next()?;
    match GeomObject::parse(text, tower) {
        Ok(o) => Ok(o),
        Err(e) => {
            lines.pos -= 1;
            lines.err(e.to_string())
        }
    }
}

fn write_provenance(id: usize, p: &Provenance) -> String {
    let mut s = format!("{id} {}", p.op.name());
    for q in &p.parents {
        s.push_str(&format!(" {q}"));
    }
    if p.op.arity() > 0 {
        s.push_str(&format!(" #{}", p.branch));
    }
    s.push_str(&format!(" @{}", p.step));
    s
}

fn read_provenance(lines: &mut Lines<'_>, id: usize) -> Result<Provenance, ClosureError> {
    let line = lines.next()?;
    let words: Vec<&str> = line.split_whitespace().collect();
    let bad = |lines: &Lines<'_>, why: &str| {
        lines.err::<Provenance>(format!("bad provenance ({why}): {line:?}"))
    };
    if words.len() < 3 || words[0].parse::<usize>().ok() != Some(id) {
        return bad(lines, "expected object id");
    }
    let Some(op) = Op::from_name(words[1]) else {
        return bad(lines, "unknown operation");
    };
    let mut parents = Vec::new();
    let mut branch = 0;
    let mut step = None;
    for w in &words[2..] {
        if let Some(b) = w.strip_prefix('#') {
            branch = match b.parse() {
                Ok(b) => b,
                Err(_) => return bad(lines, "branch"),
            };
        } else if let Some(s) = w.strip_prefix('@') {
            step = s.parse().ok();
        } else {
            match w.parse::<usize>() {
                Ok(q) if q < id => parents.push(q),
                _ => return bad(lines, "parent ids must precede the object"),
            }
        }
    }
    if parents.len() != op.arity() {
        return bad(lines, "wrong number of parents");
    }
    let Some(step) = step else {
        return bad(lines, "missing step");
    };
    Ok(Provenance {
        op,
        parents,
        branch,
        step,
    })
}

impl Configuration {
    pub fn to_text(&self) -> String {
        let mut out = format!("{HEADER}\n");
        self.write_block(&mut out);
        out
    }

    pub fn parse(text: &str) -> Result<Configuration, ClosureError> {
        let mut lines = Lines::new(text);
        lines.expect(HEADER)?;
        let cfg = Configuration::read_block(&mut lines)?;
        if !lines.at_end() {
            return lines.err("trailing input");
        }
        Ok(cfg)
    }

    /// Tower, objects and provenance, ending with `end`.
    pub(crate) fn write_block(&self, out: &mut String) {
        write_tower(&self.tower, out);
        self.write_objects(out);
    }

    /// Objects and provenance without the tower.
    pub(crate) fn write_objects(&self, out: &mut String) {
        out.push_str(&format!("objects {} closed {}\n", self.len(), self.closed));
        for e in &self.entries {
            out.push_str(&e.object.to_string());
            out.push('\n');
        }
        out.push_str("provenance\n");
        for (i, e) in self.entries.iter().enumerate() {
            out.push_str(&write_provenance(i, &e.provenance));
            out.push('\n');
        }
        out.push_str("end\n");
    }

    pub(crate) fn read_block(lines: &mut Lines<'_>) -> Result<Configuration, ClosureError> {
        let tower = read_tower(lines)?;
        Configuration::read_objects(lines, tower)
    }

    /// Objects and provenance over an already loaded tower.
    pub(crate) fn read_objects(
        lines: &mut Lines<'_>,
        tower: Arc<Tower>,
    ) -> Result<Configuration, ClosureError> {
        let (n, rest) = lines.counted("objects")?;
        let closed = match rest.as_slice() {
            ["closed", c] => c.parse().ok(),
            [] => Some(0),
            _ => None,
        };
        let Some(closed) = closed else {
            return lines.err("expected `closed <n>` after the object count");
        };
        let objects = (0..n)
            .map(|_| read_object(lines, &tower))
            .collect::<Result<Vec<_>, _>>()?;
        lines.expect("provenance")?;
        let mut cfg = Configuration::new(tower);
        for (id, obj) in objects.into_iter().enumerate() {
            let prov = read_provenance(lines, id)?;
            if !cfg.insert(obj, prov).1 {
                return lines.err(format!("object {id} duplicates an earlier object"));
            }
        }
        lines.expect("end")?;
        cfg.set_closed_prefix(closed);
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::{closure_to_depth, Budget, OpSet};
    use crate::geometry::{Conic, HPoint};

    #[test]
    fn closure_round_trips_bit_exactly() {
        let tower = Arc::new(Tower::new());
        let cfg = Configuration::from_objects(
            tower,
            [
                Conic::unit_circle().into(),
                HPoint::from_ratios((0, 1), (0, 1)).into(),
                HPoint::from_ratios((1, 2), (1, 3)).into(),
            ],
        );
        let (out, _) = closure_to_depth(&cfg, 2, &OpSet::all(), &Budget::default()).unwrap();
        assert!(!out.tower().is_empty());
        let text = out.to_text();
        let back = Configuration::parse(&text).unwrap();
        assert_eq!(back.to_text(), text);
        assert!(back.verify_provenance().is_ok());
        assert_eq!(back.closed_prefix(), out.closed_prefix());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text =
            "rulerlab-config 1\ntower 0\nobjects 1\npoint [1:2]\nprovenance\n0 given @0\nend\n";
        match Configuration::parse(text) {
            Err(ClosureError::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
        let text = "rulerlab-config 1\ntower 0\nobjects 1\npoint [1:2:1]\nprovenance\n0 join 0 0 #0 @1\nend\n";
        assert!(Configuration::parse(text).is_err());
    }
}
