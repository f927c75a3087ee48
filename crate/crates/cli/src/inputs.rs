use std::fs;
use std::path::Path;
use std::sync::Arc;

use rulerlab::closure::{Configuration, Provenance};
use rulerlab::game::{Adversary, PullbackAdversary, RationalAdversary, Trace};
use rulerlab::geometry::{circle_preserving_map, GeomObject, HPoint, ProjMap};
use rulerlab::lang::{parse, Script};
use rulerlab::numbers::{Constructible, Tower};

use crate::Fail;

pub fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail::Domain(format!("{}: {e}", path.display())))
}

pub fn write(path: &Path, text: &str) -> Result<(), Fail> {
    fs::write(path, text).map_err(|e| Fail::Domain(format!("{}: {e}", path.display())))
}

pub fn load_script(path: &Path) -> Result<Script, Fail> {
    let src = read(path)?;
    parse(&src).map_err(|errs| {
        let lines: Vec<String> = errs
            .iter()
            .map(|e| format!("{}: {e}", path.display()))
            .collect();
        Fail::Domain(lines.join("\n"))
    })
}

pub fn number(s: &str, tower: &Tower) -> Result<Constructible, Fail> {
    Constructible::parse(s, tower).map_err(|e| Fail::Usage(format!("bad number {s:?}: {e}")))
}

/// `x, y` with optional parentheses, or any object in its text form.
pub fn object(s: &str, tower: &Tower) -> Result<GeomObject, Fail> {
    let s = s.trim();
    if s.starts_with(|c: char| c.is_ascii_alphabetic()) && !s.starts_with("sqrt") {
        return GeomObject::parse(s, tower)
            .map_err(|e| Fail::Usage(format!("bad object {s:?}: {e}")));
    }
    let inner = s
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .unwrap_or(s);
    let Some((x, y)) = inner.split_once(',') else {
        return Err(Fail::Usage(format!("expected a point `x, y`, got {s:?}")));
    };
    Ok(HPoint::affine(number(x, tower)?, number(y, tower)?).into())
}

pub fn point(s: &str, tower: &Tower) -> Result<HPoint, Fail> {
    match object(s, tower)? {
        GeomObject::Point(p) => Ok(p),
        other => Err(Fail::Usage(format!("expected a point, got {other}"))),
    }
}

/// A configuration file, or a seed list with one object per line.
pub fn load_config(path: &Path) -> Result<Configuration, Fail> {
    let text = read(path)?;
    if text.trim_start().starts_with("rulerlab-config") {
        return Configuration::parse(&text)
            .map_err(|e| Fail::Domain(format!("{}: {e}", path.display())));
    }
    let tower = Arc::new(Tower::new());
    let mut cfg = Configuration::new(tower.clone());
    for (no, line) in text.lines().enumerate() {
        let line = line.split_once('#').map_or(line, |(l, _)| l).trim();
        if line.is_empty() || line.starts_with("//") {
            continue;
        }
        let obj = object(line, &tower)
            .map_err(|e| Fail::Domain(format!("{}:{}: {}", path.display(), no + 1, e.message())))?;
        cfg.insert(obj, Provenance::given());
    }
    Ok(cfg)
}

pub fn load_trace(path: &Path) -> Result<(String, Trace), Fail> {
    let text = read(path)?;
    let trace =
        Trace::parse(&text).map_err(|e| Fail::Domain(format!("{}: {e}", path.display())))?;
    Ok((text, trace))
}

pub fn circle_map(tower: &Tower, u: &str, t: &str) -> Result<ProjMap, Fail> {
    circle_preserving_map(tower, &number(u, tower)?, &number(t, tower)?)
        .map_err(|e| Fail::Usage(e.to_string()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AdversaryChoice {
    Rational,
    Pullback { u: String, t: String },
}

impl std::str::FromStr for AdversaryChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "rational" {
            return Ok(AdversaryChoice::Rational);
        }
        let args = s
            .strip_prefix("pullback:")
            .ok_or_else(|| format!("expected `rational` or `pullback:u,t`, got {s:?}"))?;
        let (u, t) = args
            .split_once(',')
            .ok_or_else(|| format!("pullback needs two parameters `u,t`, got {args:?}"))?;
        Ok(AdversaryChoice::Pullback {
            u: u.trim().to_string(),
            t: t.trim().to_string(),
        })
    }
}

impl AdversaryChoice {
    pub fn build(&self, tower: &Tower) -> Result<Box<dyn Adversary>, Fail> {
        Ok(match self {
            AdversaryChoice::Rational => Box::new(RationalAdversary::new()),
            AdversaryChoice::Pullback { u, t } => {
                Box::new(PullbackAdversary::new(circle_map(tower, u, t)?))
            }
        })
    }
}
