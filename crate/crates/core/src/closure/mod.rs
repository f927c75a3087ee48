//! Finite configurations with provenance and their closure under
//! straightedge and compass operations.

mod probe;
mod step;
mod text;

pub use probe::{density_probe, ProbeOutcome, Witness};
pub use step::{closure_step, closure_to_depth, format_stats, StatsRow, StepOutcome};
pub(crate) use text::{read_tower, write_tower, Lines};

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::geometry::{
    circle_circle_intersections, circle_from, collinear, join, line_conic_intersections, meet,
    parallel, GeomError, GeomObject, HPoint, ObjectKind,
};
use crate::numbers::{NumError, Sign, Tower};

pub type ObjId = usize;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ClosureError {
    #[error("budget exceeded: {what} (limit {limit})")]
    BudgetExceeded { what: &'static str, limit: usize },
    #[error(transparent)]
    Geom(GeomError),
    #[error("object {0} has the wrong kind for this operation")]
    WrongKind(ObjId),
    #[error("unknown object id {0}")]
    UnknownId(ObjId),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl From<GeomError> for ClosureError {
    fn from(e: GeomError) -> Self {
        match e {
            GeomError::Num(NumError::BudgetExceeded { what, limit }) => {
                ClosureError::BudgetExceeded { what, limit }
            }
            other => ClosureError::Geom(other),
        }
    }
}

impl From<NumError> for ClosureError {
    fn from(e: NumError) -> Self {
        GeomError::from(e).into()
    }
}

/// Construction operation that produced an object.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    Given,
    /// Point supplied in answer to an open-set request.
    Request,
    Join,
    Meet,
    LineConic,
    ConicConic,
    Circle,
}

impl Op {
    pub fn name(self) -> &'static str {
        match self {
            Op::Given => "given",
            Op::Request => "request",
            Op::Join => "join",
            Op::Meet => "meet",
            Op::LineConic => "line-conic",
            Op::ConicConic => "conic-conic",
            Op::Circle => "circle",
        }
    }

    pub fn from_name(s: &str) -> Option<Op> {
        [
            Op::Given,
            Op::Request,
            Op::Join,
            Op::Meet,
            Op::LineConic,
            Op::ConicConic,
            Op::Circle,
        ]
        .into_iter()
        .find(|op| op.name() == s)
    }

    pub fn arity(self) -> usize {
        match self {
            Op::Given | Op::Request => 0,
            Op::Circle => 3,
            _ => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub op: Op,
    pub parents: Vec<ObjId>,
    /// Position of the object in the operation's labeled result list.
    pub branch: u8,
    pub step: usize,
}

impl Provenance {
    pub fn given() -> Self {
        Provenance {
            op: Op::Given,
            parents: Vec::new(),
            branch: 0,
            step: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Entry {
    pub object: GeomObject,
    pub provenance: Provenance,
}

/// Enabled construction operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OpSet {
    pub join: bool,
    pub meet: bool,
    pub line_conic: bool,
    pub conic_conic: bool,
    pub compass: bool,
    /// Whether points at infinity and the line at infinity take part.
    pub projective: bool,
}

impl Default for OpSet {
    fn default() -> Self {
        OpSet::all()
    }
}

impl OpSet {
    pub fn all() -> Self {
        OpSet {
            join: true,
            meet: true,
            line_conic: true,
            conic_conic: true,
            compass: true,
            projective: true,
        }
    }

    /// Everything except drawing new circles.
    pub fn straightedge() -> Self {
        OpSet {
            compass: false,
            ..OpSet::all()
        }
    }

    pub fn joins_and_meets() -> Self {
        OpSet {
            line_conic: false,
            conic_conic: false,
            compass: false,
            ..OpSet::all()
        }
    }

    pub fn any(&self) -> bool {
        self.join || self.meet || self.line_conic || self.conic_conic || self.compass
    }

    /// Parses a comma-separated flag list such as `join,meet,affine`.
    pub fn parse(s: &str) -> Result<OpSet, String> {
        let mut ops = OpSet {
            join: false,
            meet: false,
            line_conic: false,
            conic_conic: false,
            compass: false,
            projective: true,
        };
        for flag in s.split(',').map(str::trim).filter(|f| !f.is_empty()) {
            match flag {
                "join" => ops.join = true,
                "meet" => ops.meet = true,
                "line-conic" => ops.line_conic = true,
                "conic-conic" => ops.conic_conic = true,
                "compass" => ops.compass = true,
                "straightedge" => {
                    ops = OpSet {
                        projective: ops.projective,
                        ..OpSet::straightedge()
                    }
                }
                "all" => {
                    ops = OpSet {
                        projective: ops.projective,
                        ..OpSet::all()
                    }
                }
                "affine" => ops.projective = false,
                _ => return Err(format!("unknown operation flag {flag:?}")),
            }
        }
        if !ops.any() {
            return Err("no operation enabled".into());
        }
        Ok(ops)
    }
}

/// Limits on closure growth.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_objects: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_objects: 20_000,
        }
    }
}

type BucketKey = (ObjectKind, u8, i64);

/// A finite configuration: deduplicated points, lines and conics over one
/// tower, each with the operation that produced it.
#[derive(Clone)]
pub struct Configuration {
    tower: Arc<Tower>,
    entries: Vec<Entry>,
    buckets: HashMap<BucketKey, Vec<ObjId>>,
    /// Every operation on objects below this index has been applied.
    closed: usize,
}

const CELL: f64 = (1u64 << 20) as f64;
const WEIGHTS: [f64; 5] = [
    1.0,
    0.754_877_666,
    0.569_840_291,
    0.430_159_709,
    0.324_717_957,
];

/// Bucket coordinates: the position of the leading 1, the cell of a weighted
/// sum of the remaining coordinates, and a cell range that certainly covers
/// the cell any equal object would get.
fn signature(obj: &GeomObject) -> (u8, i64, i64, i64) {
    let coords = obj.coordinates();
    let lead = coords
        .iter()
        .position(|x| x.sign() != Sign::Zero)
        .unwrap_or(0);
    let mut sum = 0.0;
    let mut mag = 1.0;
    for (x, w) in coords[lead + 1..].iter().zip(WEIGHTS) {
        let v = x.to_f64();
        sum += w * v;
        mag += v.abs();
    }
    if !sum.is_finite() || mag > 1e12 {
        return (lead as u8, i64::MAX, i64::MAX, i64::MAX);
    }
    let slack = 1e-9 * mag;
    let lo = ((sum - slack) * CELL).floor() as i64;
    let hi = ((sum + slack) * CELL).floor() as i64;
    (lead as u8, (sum * CELL).floor() as i64, lo, hi)
}

impl Configuration {
    pub fn new(tower: Arc<Tower>) -> Self {
        Configuration {
            tower,
            entries: Vec::new(),
            buckets: HashMap::new(),
            closed: 0,
        }
    }

    /// Configuration of given objects; duplicates are dropped.
    pub fn from_objects(tower: Arc<Tower>, objects: impl IntoIterator<Item = GeomObject>) -> Self {
        let mut cfg = Configuration::new(tower);
        for obj in objects {
            cfg.insert(obj, Provenance::given());
        }
        cfg
    }

    /// The same configuration with every object replaced by `f(object)`,
    /// keeping ids and provenance. `f` must be injective on the objects.
    pub fn mapped(&self, f: impl Fn(&GeomObject) -> GeomObject) -> Configuration {
        let mut cfg = Configuration::new(self.tower.clone());
        for e in &self.entries {
            cfg.insert(f(&e.object), e.provenance.clone());
        }
        cfg.closed = self.closed.min(cfg.len());
        cfg
    }

    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn get(&self, id: ObjId) -> Option<&Entry> {
        self.entries.get(id)
    }

    pub fn object(&self, id: ObjId) -> Result<&GeomObject, ClosureError> {
        self.entries
            .get(id)
            .map(|e| &e.object)
            .ok_or(ClosureError::UnknownId(id))
    }

    pub fn closed_prefix(&self) -> usize {
        self.closed
    }

    pub(crate) fn set_closed_prefix(&mut self, n: usize) {
        self.closed = n.min(self.entries.len());
    }

    pub fn points(&self) -> impl Iterator<Item = (ObjId, &HPoint)> {
        self.entries
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.object.as_point().map(|p| (i, p)))
    }

    /// Number of points, lines and conics.
    pub fn counts(&self) -> (usize, usize, usize) {
        let mut c = (0, 0, 0);
        for e in &self.entries {
            match e.object.kind() {
                ObjectKind::Point => c.0 += 1,
                ObjectKind::Line => c.1 += 1,
                ObjectKind::Conic => c.2 += 1,
            }
        }
        c
    }

    pub fn find(&self, obj: &GeomObject) -> Option<ObjId> {
        let (lead, _, lo, hi) = signature(obj);
        let kind = obj.kind();
        (lo..=hi)
            .filter_map(|cell| self.buckets.get(&(kind, lead, cell)))
            .flatten()
            .copied()
            .find(|&id| self.entries[id].object == *obj)
    }

    pub fn contains(&self, obj: &GeomObject) -> bool {
        self.find(obj).is_some()
    }

    /// Adds `obj` unless an equal object is present. Returns its id and
    /// whether it was new.
    pub fn insert(&mut self, obj: GeomObject, provenance: Provenance) -> (ObjId, bool) {
        if let Some(id) = self.find(&obj) {
            return (id, false);
        }
        let (lead, cell, _, _) = signature(&obj);
        let id = self.entries.len();
        self.buckets
            .entry((obj.kind(), lead, cell))
            .or_default()
            .push(id);
        self.entries.push(Entry {
            object: obj,
            provenance,
        });
        (id, true)
    }

    /// Applies one construction operation to stored objects. Results come in
    /// labeling order; the list may be empty (e.g. disjoint circles).
    pub fn derive(&self, op: Op, parents: &[ObjId]) -> Result<Vec<GeomObject>, ClosureError> {
        if parents.len() != op.arity() {
            return Err(ClosureError::Parse {
                line: 0,
                msg: format!("{} takes {} arguments", op.name(), op.arity()),
            });
        }
        let point = |i: usize| {
            self.object(parents[i])?
                .as_point()
                .ok_or(ClosureError::WrongKind(parents[i]))
        };
        let line = |i: usize| {
            self.object(parents[i])?
                .as_line()
                .ok_or(ClosureError::WrongKind(parents[i]))
        };
        let conic = |i: usize| {
            self.object(parents[i])?
                .as_conic()
                .ok_or(ClosureError::WrongKind(parents[i]))
        };
        let tower = &self.tower;
        let out: Vec<GeomObject> = match op {
            Op::Given | Op::Request => Vec::new(),
            Op::Join => vec![join(point(0)?, point(1)?)?.into()],
            Op::Meet => vec![meet(line(0)?, line(1)?)?.into()],
            Op::LineConic => line_conic_intersections(tower, line(0)?, conic(1)?)?
                .into_iter()
                .map(GeomObject::from)
                .collect(),
            Op::ConicConic => circle_circle_intersections(tower, conic(0)?, conic(1)?)?
                .into_iter()
                .map(GeomObject::from)
                .collect(),
            Op::Circle => vec![circle_from(point(0)?, point(1)?, point(2)?)?.into()],
        };
        for obj in &out {
            for x in obj.coordinates() {
                tower.check_size(x)?;
            }
        }
        Ok(out)
    }

    /// Recomputes every derived object from its recorded parents and reports
    /// the first id whose stored object differs.
    pub fn verify_provenance(&self) -> Result<(), ObjId> {
        for (id, e) in self.entries.iter().enumerate() {
            let p = &e.provenance;
            if p.parents.iter().any(|&q| q >= id) {
                return Err(id);
            }
            if matches!(p.op, Op::Given | Op::Request) {
                continue;
            }
            match self.derive(p.op, &p.parents) {
                Ok(objs) if objs.get(p.branch as usize) == Some(&e.object) => {}
                _ => return Err(id),
            }
        }
        Ok(())
    }

    /// Construction depth of each object: given and requested objects have
    /// depth 0, derived ones one more than their deepest parent.
    pub fn depths(&self) -> Vec<usize> {
        let mut d = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            let p = &e.provenance;
            let v = if p.parents.is_empty() {
                0
            } else {
                1 + p.parents.iter().map(|&q| d[q]).max().unwrap_or(0)
            };
            d.push(v);
        }
        d
    }

    /// Ids needed to build `id`, in construction order.
    pub fn derivation_chain(&self, id: ObjId) -> Vec<ObjId> {
        let mut need = vec![false; id + 1];
        need[id] = true;
        for i in (0..=id).rev() {
            if need[i] {
                for &p in &self.entries[i].provenance.parents {
                    need[p] = true;
                }
            }
        }
        (0..=id).filter(|&i| need[i]).collect()
    }
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (p, l, c) = self.counts();
        write!(f, "Configuration({p} points, {l} lines, {c} conics)")
    }
}

/// Four finite points with no three collinear and six pairwise
/// non-parallel connecting lines.
pub fn generic_quadruple_check(pts: [&HPoint; 4]) -> bool {
    if pts.iter().any(|p| !p.is_finite()) {
        return false;
    }
    for skip in 0..4 {
        let t: Vec<&HPoint> = (0..4).filter(|&i| i != skip).map(|i| pts[i]).collect();
        if collinear(t[0], t[1], t[2]) {
            return false;
        }
    }
    let mut lines = Vec::with_capacity(6);
    for i in 0..4 {
        for j in i + 1..4 {
            match join(pts[i], pts[j]) {
                Ok(l) => lines.push(l),
                Err(_) => return false,
            }
        }
    }
    for i in 0..6 {
        for j in i + 1..6 {
            if parallel(&lines[i], &lines[j]) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Conic, HLine};

    fn pt(x: i64, y: i64) -> HPoint {
        HPoint::from_ratios((x, 1), (y, 1))
    }

    #[test]
    fn generic_quadruple_examples() {
        assert!(generic_quadruple_check([
            &pt(0, 0),
            &pt(1, 0),
            &pt(0, 1),
            &pt(2, 3)
        ]));
        assert!(!generic_quadruple_check([
            &pt(0, 0),
            &pt(1, 0),
            &pt(0, 1),
            &pt(1, 1)
        ]));
        assert!(!generic_quadruple_check([
            &pt(0, 0),
            &pt(1, 0),
            &pt(2, 0),
            &pt(0, 1)
        ]));
    }

    #[test]
    fn insert_deduplicates_exactly() {
        let tower = Arc::new(Tower::new());
        let mut cfg = Configuration::new(tower.clone());
        let r2 = tower.sqrt(&2.into()).unwrap();
        let a = HPoint::affine(r2.clone(), 1.into());
        // same point, different homogeneous scaling
        let b = HPoint::new(&r2 * &r2, r2.clone(), r2.clone()).unwrap();
        assert!(cfg.insert(a.into(), Provenance::given()).1);
        assert!(!cfg.insert(b.into(), Provenance::given()).1);
        assert!(cfg.insert(pt(1, 1).into(), Provenance::given()).1);
        assert_eq!(cfg.len(), 2);
    }

    #[test]
    fn membership_examples() {
        let tower = Arc::new(Tower::new());
        let cfg = Configuration::from_objects(tower, [Conic::unit_circle().into()]);
        assert!(!cfg.contains(&pt(0, 0).into()));
        assert!(cfg.contains(&Conic::unit_circle().into()));
        assert!(!cfg.contains(&HLine::at_infinity().into()));
    }

    #[test]
    fn op_flags_parse() {
        assert_eq!(OpSet::parse("join,meet").unwrap(), OpSet::joins_and_meets());
        assert!(!OpSet::parse("straightedge,affine").unwrap().projective);
        assert!(OpSet::parse("affine").is_err());
        assert!(OpSet::parse("warp").is_err());
    }
}
