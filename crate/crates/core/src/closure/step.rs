use crate::geometry::{GeomError, GeomObject, ObjectKind};

use super::{Budget, ClosureError, Configuration, ObjId, Op, OpSet, Provenance};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StatsRow {
    pub depth: usize,
    pub points: usize,
    pub lines: usize,
    pub conics: usize,
}

impl StatsRow {
    fn of(depth: usize, cfg: &Configuration) -> Self {
        let (points, lines, conics) = cfg.counts();
        StatsRow {
            depth,
            points,
            lines,
            conics,
        }
    }
}

/// `depth,points,lines,conics` rows with a header line.
pub fn format_stats(rows: &[StatsRow]) -> String {
    let mut out = String::from("depth,points,lines,conics\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.depth, r.points, r.lines, r.conics
        ));
    }
    out
}

#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub config: Configuration,
    pub fixed_point: bool,
}

fn usable(cfg: &Configuration, id: ObjId, ops: &OpSet) -> bool {
    if ops.projective {
        return true;
    }
    match &cfg.entries[id].object {
        GeomObject::Point(p) => p.is_finite(),
        GeomObject::Line(l) => !l.is_at_infinity(),
        GeomObject::Conic(_) => true,
    }
}

/// Operation applicable to an unordered pair of object kinds.
fn pair_op(a: ObjectKind, b: ObjectKind, ops: &OpSet) -> Option<(Op, bool)> {
    use ObjectKind::*;
    match (a, b) {
        (Point, Point) if ops.join => Some((Op::Join, false)),
        (Line, Line) if ops.meet => Some((Op::Meet, false)),
        (Line, Conic) if ops.line_conic => Some((Op::LineConic, false)),
        (Conic, Line) if ops.line_conic => Some((Op::LineConic, true)),
        (Conic, Conic) if ops.conic_conic => Some((Op::ConicConic, false)),
        _ => None,
    }
}

/// Geometric failures that only mean "no new object here".
fn skippable(e: &ClosureError) -> bool {
    matches!(
        e,
        ClosureError::Geom(
            GeomError::LineInConic
                | GeomError::NotACircle
                | GeomError::ConcentricCircles
                | GeomError::IdenticalCircles
                | GeomError::CoincidentPoints
                | GeomError::CoincidentLines
                | GeomError::DegenerateRadius
                | GeomError::InfinitePoint
        )
    )
}

fn add_results(
    cfg: &mut Configuration,
    op: Op,
    parents: Vec<ObjId>,
    step: usize,
    ops: &OpSet,
    budget: &Budget,
) -> Result<(), ClosureError> {
    let results = match cfg.derive(op, &parents) {
        Ok(r) => r,
        Err(e) if skippable(&e) => return Ok(()),
        Err(e) => return Err(e),
    };
    for (branch, obj) in results.into_iter().enumerate() {
        if !ops.projective {
            if let GeomObject::Point(p) = &obj {
                if !p.is_finite() {
                    continue;
                }
            }
        }
        let prov = Provenance {
            op,
            parents: parents.clone(),
            branch: branch as u8,
            step,
        };
        if cfg.insert(obj, prov).1 && cfg.len() > budget.max_objects {
            return Err(ClosureError::BudgetExceeded {
                what: "objects",
                limit: budget.max_objects,
            });
        }
    }
    Ok(())
}

/// Applies every enabled operation once to the objects of `cfg`.
///
/// Objects are produced in a fixed order (pairs by the later id, then the
/// earlier one; compass triples after pairs), so the result depends only on
/// the input's insertion order, and as a set not even on that.
pub fn closure_step(
    cfg: &Configuration,
    ops: &OpSet,
    budget: &Budget,
) -> Result<StepOutcome, ClosureError> {
    let mut next = cfg.clone();
    let fixed_point = step_in_place(&mut next, ops, budget, 1 + max_step(cfg))?;
    Ok(StepOutcome {
        config: next,
        fixed_point,
    })
}

fn max_step(cfg: &Configuration) -> usize {
    cfg.entries
        .iter()
        .map(|e| e.provenance.step)
        .max()
        .unwrap_or(0)
}

pub(crate) fn step_in_place(
    cfg: &mut Configuration,
    ops: &OpSet,
    budget: &Budget,
    step: usize,
) -> Result<bool, ClosureError> {
    let n = cfg.len();
    let closed = cfg.closed;
    let before = n;
    for j in closed..n {
        if !usable(cfg, j, ops) {
            continue;
        }
        for i in 0..j {
            if !usable(cfg, i, ops) {
                continue;
            }
            let (ki, kj) = (cfg.entries[i].object.kind(), cfg.entries[j].object.kind());
            if let Some((op, swap)) = pair_op(ki, kj, ops) {
                let parents = if swap { vec![j, i] } else { vec![i, j] };
                add_results(cfg, op, parents, step, ops, budget)?;
            }
        }
    }
    if ops.compass {
        let pts: Vec<ObjId> = (0..n)
            .filter(|&i| matches!(&cfg.entries[i].object, GeomObject::Point(p) if p.is_finite()))
            .collect();
        for (bi, &b) in pts.iter().enumerate() {
            for &a in &pts[..bi] {
                for &c in &pts {
                    if b < closed && c < closed {
                        continue;
                    }
                    add_results(cfg, Op::Circle, vec![c, a, b], step, ops, budget)?;
                }
            }
        }
    }
    cfg.closed = n;
    Ok(cfg.len() == before)
}

/// `d`-fold closure with one statistics row per depth (row 0 is the input).
pub fn closure_to_depth(
    cfg: &Configuration,
    d: usize,
    ops: &OpSet,
    budget: &Budget,
) -> Result<(Configuration, Vec<StatsRow>), ClosureError> {
    let mut cur = cfg.clone();
    let mut rows = vec![StatsRow::of(0, &cur)];
    let base = max_step(cfg);
    for depth in 1..=d {
        let fixed = step_in_place(&mut cur, ops, budget, base + depth)?;
        rows.push(StatsRow::of(depth, &cur));
        if fixed {
            // further steps cannot add anything
            for later in depth + 1..=d {
                rows.push(StatsRow::of(later, &cur));
            }
            break;
        }
    }
    Ok((cur, rows))
}
