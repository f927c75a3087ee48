use std::cmp::Ordering;

use crate::geometry::{join, meet, GeomError, GeomObject, HLine, HPoint};
use crate::numbers::{Constructible, Rational, Sign};

use super::step::step_in_place;
use super::{Budget, ClosureError, Configuration, ObjId, Op, OpSet, Provenance};

#[derive(Clone, Debug)]
pub struct Witness {
    pub id: ObjId,
    pub point: HPoint,
    /// Construction depth of the witness from the seed objects.
    pub depth: usize,
    /// The configuration the witness was found in.
    pub config: Configuration,
}

#[derive(Clone, Debug)]
pub enum ProbeOutcome {
    Found(Witness),
    /// Inconclusive: the search ran out of budget, or the closure stopped
    /// growing without reaching the box.
    NotFound {
        fixed_point: bool,
        objects: usize,
    },
}

impl ProbeOutcome {
    pub fn witness(&self) -> Option<&Witness> {
        match self {
            ProbeOutcome::Found(w) => Some(w),
            ProbeOutcome::NotFound { .. } => None,
        }
    }
}

const NEAR_POINTS: usize = 8;
const GOOD_LINES: usize = 16;
const NEW_POINTS: usize = 8;
const GREEDY_ROUNDS: usize = 60;

struct Target {
    x: Constructible,
    y: Constructible,
    eps: Constructible,
    xf: f64,
    yf: f64,
}

impl Target {
    fn within(&self, p: &HPoint) -> bool {
        let Some((x, y)) = p.to_affine() else {
            return false;
        };
        let close = |d: Constructible| (&d.abs() - &self.eps).sign() == Sign::Negative;
        close(&x - &self.x) && close(&y - &self.y)
    }

    fn point_dist(&self, p: (f64, f64)) -> f64 {
        (p.0 - self.xf).hypot(p.1 - self.yf)
    }

    fn line_dist(&self, l: &[f64; 3]) -> f64 {
        (l[0] * self.xf + l[1] * self.yf + l[2]).abs() / l[0].hypot(l[1])
    }
}

fn line_f64(l: &HLine) -> [f64; 3] {
    let c = l.coords();
    [c[0].to_f64(), c[1].to_f64(), c[2].to_f64()]
}

fn meet_f64(a: &[f64; 3], b: &[f64; 3]) -> Option<(f64, f64)> {
    let z = a[0] * b[1] - a[1] * b[0];
    if z.abs() < 1e-300 {
        return None;
    }
    Some((
        (a[1] * b[2] - a[2] * b[1]) / z,
        (a[2] * b[0] - a[0] * b[2]) / z,
    ))
}

fn by_key(a: f64, b: f64) -> Ordering {
    a.partial_cmp(&b).unwrap_or(Ordering::Equal)
}

/// Searches the closure of `cfg` for a point within `eps` of `target` in
/// both coordinates.
///
/// Best-first rounds draw the lines passing closest to the target and
/// intersect them; if that stalls, plain breadth-first closure takes over.
/// `NotFound` never disproves density.
pub fn density_probe(
    cfg: &Configuration,
    target: &HPoint,
    eps: &Rational,
    ops: &OpSet,
    budget: &Budget,
) -> Result<ProbeOutcome, ClosureError> {
    let (tx, ty) = target.to_affine().ok_or(GeomError::InfinitePoint)?;
    if Sign::of_rational(eps) != Sign::Positive {
        return Err(
            GeomError::ParameterOutOfRange(format!("epsilon must be positive, got {eps}")).into(),
        );
    }
    let goal = Target {
        xf: tx.to_f64(),
        yf: ty.to_f64(),
        x: tx,
        y: ty,
        eps: Constructible::rational(eps.clone()),
    };
    let mut work = cfg.clone();
    if let Some(w) = scan(&work, &goal, 0) {
        return Ok(ProbeOutcome::Found(w));
    }
    let mut step = 1 + work
        .entries
        .iter()
        .map(|e| e.provenance.step)
        .max()
        .unwrap_or(0);
    if ops.join && ops.meet {
        for _ in 0..GREEDY_ROUNDS {
            let before = work.len();
            match greedy_round(&mut work, &goal, ops, budget, step) {
                Ok(Some(id)) => return Ok(ProbeOutcome::Found(witness(work, id))),
                Ok(None) => {}
                Err(ClosureError::BudgetExceeded { .. }) => {
                    return Ok(ProbeOutcome::NotFound {
                        fixed_point: false,
                        objects: work.len(),
                    })
                }
                Err(e) => return Err(e),
            }
            step += 1;
            if work.len() == before {
                break;
            }
        }
    }
    // breadth-first fallback from the original configuration
    let mut work = cfg.clone();
    work.closed = 0;
    let mut seen = 0;
    loop {
        let fixed = match step_in_place(&mut work, ops, budget, step) {
            Ok(f) => f,
            Err(ClosureError::BudgetExceeded { .. }) => {
                return Ok(ProbeOutcome::NotFound {
                    fixed_point: false,
                    objects: work.len(),
                })
            }
            Err(e) => return Err(e),
        };
        if let Some(w) = scan(&work, &goal, seen) {
            return Ok(ProbeOutcome::Found(w));
        }
        seen = work.len();
        step += 1;
        if fixed {
            return Ok(ProbeOutcome::NotFound {
                fixed_point: true,
                objects: work.len(),
            });
        }
    }
}

fn witness(cfg: Configuration, id: ObjId) -> Witness {
    Witness {
        id,
        point: cfg.entries[id].object.as_point().unwrap().clone(),
        depth: cfg.depths()[id],
        config: cfg,
    }
}

fn scan(cfg: &Configuration, goal: &Target, from: usize) -> Option<Witness> {
    let id = (from..cfg.len())
        .find(|&i| matches!(&cfg.entries[i].object, GeomObject::Point(p) if goal.within(p)))?;
    Some(witness(cfg.clone(), id))
}

fn affine_points(cfg: &Configuration) -> Vec<(ObjId, (f64, f64))> {
    cfg.points()
        .filter_map(|(i, p)| p.to_affine_f64().map(|xy| (i, xy)))
        .collect()
}

/// One best-first round. Returns the id of a point inside the box, if one
/// was added.
fn greedy_round(
    cfg: &mut Configuration,
    goal: &Target,
    ops: &OpSet,
    budget: &Budget,
    step: usize,
) -> Result<Option<ObjId>, ClosureError> {
    let mut pts = affine_points(cfg);
    pts.sort_by(|a, b| by_key(goal.point_dist(a.1), goal.point_dist(b.1)).then(a.0.cmp(&b.0)));
    let near: Vec<_> = pts.iter().take(NEAR_POINTS).copied().collect();

    // candidate lines: stored lines and joins of near points with any point
    let mut lines: Vec<(f64, Option<ObjId>, (ObjId, ObjId))> = Vec::new();
    for (i, e) in cfg.entries.iter().enumerate() {
        if let GeomObject::Line(l) = &e.object {
            if ops.projective || !l.is_at_infinity() {
                lines.push((goal.line_dist(&line_f64(l)), Some(i), (0, 0)));
            }
        }
    }
    for &(p, pf) in &near {
        for &(q, qf) in &pts {
            if p == q {
                continue;
            }
            let l = [pf.1 - qf.1, qf.0 - pf.0, pf.0 * qf.1 - pf.1 * qf.0];
            if l[0] == 0.0 && l[1] == 0.0 {
                continue;
            }
            lines.push((goal.line_dist(&l), None, (p.min(q), p.max(q))));
        }
    }
    lines.sort_by(|a, b| by_key(a.0, b.0).then(a.2.cmp(&b.2)).then(a.1.cmp(&b.1)));
    let mut chosen: Vec<ObjId> = Vec::new();
    for (_, stored, (p, q)) in lines {
        if chosen.len() == GOOD_LINES {
            break;
        }
        let id = match stored {
            Some(id) => id,
            None => {
                let (a, b) = (
                    cfg.entries[p].object.as_point().unwrap(),
                    cfg.entries[q].object.as_point().unwrap(),
                );
                let l = match join(a, b) {
                    Ok(l) => l,
                    Err(_) => continue,
                };
                let prov = Provenance {
                    op: Op::Join,
                    parents: vec![p, q],
                    branch: 0,
                    step,
                };
                let (id, new) = cfg.insert(l.into(), prov);
                if new && cfg.len() > budget.max_objects {
                    return Err(ClosureError::BudgetExceeded {
                        what: "objects",
                        limit: budget.max_objects,
                    });
                }
                id
            }
        };
        if !chosen.contains(&id) {
            chosen.push(id);
        }
    }

    let lf: Vec<[f64; 3]> = chosen
        .iter()
        .map(|&i| line_f64(cfg.entries[i].object.as_line().unwrap()))
        .collect();
    let mut meets: Vec<(f64, ObjId, ObjId)> = Vec::new();
    for a in 0..chosen.len() {
        for b in a + 1..chosen.len() {
            if let Some(xy) = meet_f64(&lf[a], &lf[b]) {
                let (i, j) = (chosen[a].min(chosen[b]), chosen[a].max(chosen[b]));
                meets.push((goal.point_dist(xy), i, j));
            }
        }
    }
    meets.sort_by(|a, b| by_key(a.0, b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    let mut added = 0;
    for (_, i, j) in meets {
        if added == NEW_POINTS {
            break;
        }
        let (l, m) = (
            cfg.entries[i].object.as_line().unwrap(),
            cfg.entries[j].object.as_line().unwrap(),
        );
        let Ok(p) = meet(l, m) else { continue };
        let hit = goal.within(&p);
        let prov = Provenance {
            op: Op::Meet,
            parents: vec![i, j],
            branch: 0,
            step,
        };
        let (id, new) = cfg.insert(p.into(), prov);
        if new {
            added += 1;
            if hit {
                return Ok(Some(id));
            }
            if cfg.len() > budget.max_objects {
                return Err(ClosureError::BudgetExceeded {
                    what: "objects",
                    limit: budget.max_objects,
                });
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::numbers::Tower;

    fn seed(points: &[(i64, i64)]) -> Configuration {
        Configuration::from_objects(
            Arc::new(Tower::new()),
            points
                .iter()
                .map(|&(x, y)| HPoint::from_ratios((x, 1), (y, 1)).into()),
        )
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn target_already_present() {
        let cfg = seed(&[(0, 0), (1, 0)]);
        let out = density_probe(
            &cfg,
            &HPoint::from_ratios((1, 1), (0, 1)),
            &q(1, 1000),
            &OpSet::all(),
            &Budget::default(),
        )
        .unwrap();
        let w = out.witness().unwrap();
        assert_eq!((w.id, w.depth), (1, 0));
    }

    #[test]
    fn two_points_straightedge_only() {
        let cfg = seed(&[(0, 0), (1, 0)]);
        let out = density_probe(
            &cfg,
            &HPoint::from_ratios((1, 3), (1, 7)),
            &q(1, 1000),
            &OpSet::straightedge(),
            &Budget::default(),
        )
        .unwrap();
        assert!(matches!(
            out,
            ProbeOutcome::NotFound {
                fixed_point: true,
                ..
            }
        ));
    }

    #[test]
    fn generic_seed_reaches_target() {
        let cfg = seed(&[(0, 0), (1, 0), (0, 1), (2, 3)]);
        let t = std::time::Instant::now();
        let out = density_probe(
            &cfg,
            &HPoint::from_ratios((1, 3), (1, 7)),
            &q(1, 1000),
            &OpSet::joins_and_meets(),
            &Budget::default(),
        )
        .unwrap();
        let w = out.witness().unwrap();
        println!(
            "depth {} objects {} {:?} {:?}",
            w.depth,
            w.config.len(),
            w.point.to_affine_f64(),
            t.elapsed()
        );
    }
}
