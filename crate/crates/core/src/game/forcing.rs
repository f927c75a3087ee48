//! Opening moves Alice can force regardless of Bob's answers.

use num_traits::{One, Signed};

use crate::closure::{generic_quadruple_check, ObjId};
use crate::geometry::{between, GeomObject, HPoint};
use crate::numbers::{Constructible, Rational, Sign};

use super::{Board, OpenSet, Stop};

/// Default disc centers for the generic opening.
pub const GENERIC_SEEDS: [(i64, i64); 4] = [(0, 0), (1, 0), (0, 1), (2, 3)];

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Largest radius from `1/2, 1/5, 1/10, 1/20, ...` such that any four points
/// within that distance of the seeds are in general position. Each condition
/// `ad − bc ≠ 0` on coordinate differences survives perturbations of the
/// differences by less than `2r` when `|ad − bc| > 2r(|a|+|b|+|c|+|d|) + 8r²`.
/// `None` if the seeds themselves are degenerate.
pub fn quadruple_radius(seeds: &[(i64, i64); 4]) -> Option<Rational> {
    let p: Vec<(Rational, Rational)> = seeds.iter().map(|&(x, y)| (q(x), q(y))).collect();
    let diff = |i: usize, j: usize| (&p[j].0 - &p[i].0, &p[j].1 - &p[i].1);
    let mut conds = Vec::new();
    // no three collinear
    for (i, j, k) in [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)] {
        conds.push((diff(i, j), diff(i, k)));
    }
    // opposite sides not parallel
    for (i, j, k, l) in [(0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2)] {
        conds.push((diff(i, j), diff(k, l)));
    }
    let ok = |r: &Rational| {
        conds.iter().all(|((a, c), (b, d))| {
            let g = (a * d - c * b).abs();
            let s = a.abs() + b.abs() + c.abs() + d.abs();
            g > q(2) * r * s + q(8) * r * r
        })
    };
    let mut scale = Rational::one();
    for _ in 0..20 {
        for m in [2, 5, 10] {
            let r = &scale / q(m);
            if ok(&r) {
                return Some(r);
            }
        }
        scale /= q(10);
    }
    None
}

/// Four open-set requests around `seeds`; the answers are certified to be a
/// generic quadruple and this is rechecked exactly.
pub fn force_generic_quadruple_at(
    board: &mut Board<'_>,
    seeds: &[(i64, i64); 4],
) -> Result<[ObjId; 4], Stop> {
    let radius = quadruple_radius(seeds).ok_or_else(|| Stop::Aborted("degenerate seeds".into()))?;
    let mut ids = [0; 4];
    for (slot, &(x, y)) in ids.iter_mut().zip(seeds) {
        *slot = board.request(OpenSet::disc(
            HPoint::from_ratios((x, 1), (y, 1)),
            radius.clone(),
        ))?;
    }
    let pts: Vec<&HPoint> = ids
        .iter()
        .map(|&id| {
            board
                .object(id)
                .and_then(GeomObject::as_point)
                .expect("requested point")
        })
        .collect();
    if !generic_quadruple_check([pts[0], pts[1], pts[2], pts[3]]) {
        return Err(Stop::Aborted("forced quadruple is not generic".into()));
    }
    Ok(ids)
}

pub fn force_generic_quadruple(board: &mut Board<'_>) -> Result<[ObjId; 4], Stop> {
    force_generic_quadruple_at(board, &GENERIC_SEEDS)
}

/// Rational `a` with `a² < x` (`below`) or `a² > x`, near `factor·√x`.
fn rational_root_bound(x: &Constructible, below: bool) -> Rational {
    let approx = x.to_f64().max(0.0).sqrt();
    let mut a = if below {
        Rational::new(
            (((0.9 * approx) * 1024.0).floor() as i64).into(),
            1024.into(),
        )
    } else {
        Rational::new(
            (((1.1 * approx) * 1024.0).ceil() as i64 + 1).into(),
            1024.into(),
        )
    };
    loop {
        let diff = &Constructible::rational(&a * &a) - x;
        match (below, diff.sign()) {
            (true, Sign::Negative) if a.is_positive() => return a,
            (false, Sign::Positive) => return a,
            (true, _) => {
                a = if a.is_positive() {
                    a / q(2)
                } else {
                    Rational::new(1.into(), 1024.into())
                }
            }
            (false, _) => a = a * q(2) + Rational::one(),
        }
    }
}

fn offset(
    base: (&Constructible, &Constructible),
    dir: (&Rational, &Rational),
    s: &Rational,
) -> HPoint {
    let x = base.0 + &Constructible::rational(dir.0 * s);
    let y = base.1 + &Constructible::rational(dir.1 * s);
    HPoint::affine(x, y)
}

/// Forces a point on a line or circle in four moves: one point on each side,
/// their join, and its intersection with the curve. `hint` picks where on
/// the curve (a parameter along the line, or the rational angle parameter
/// on the circle). Returns the forced point.
pub fn force_point_on_curve(
    board: &mut Board<'_>,
    curve: ObjId,
    hint: &Rational,
) -> Result<ObjId, Stop> {
    let obj = board
        .object(curve)
        .cloned()
        .ok_or_else(|| Stop::Aborted(format!("unknown curve {curve}")))?;
    let (inner, outer) = match &obj {
        GeomObject::Line(l) if !l.is_at_infinity() => {
            let [a, b, c] = l.coords();
            let base = if a.sign() != Sign::Zero {
                (-(c * &a.recip().expect("nonzero")), Constructible::zero())
            } else {
                (Constructible::zero(), -(c * &b.recip().expect("nonzero")))
            };
            let on = HPoint::affine(
                &base.0 + &(b * &Constructible::rational(hint.clone())),
                &base.1 - &(a * &Constructible::rational(hint.clone())),
            );
            let (ox, oy) = on.to_affine().expect("finite");
            // canonical lines have |(a, b)| ≥ 1, so radius 1/2 stays on one side
            let half = Rational::new(1.into(), 2.into());
            let side = |s: i64| {
                let s = Constructible::integer(s);
                OpenSet::disc(
                    HPoint::affine(&ox + &(a * &s), &oy + &(b * &s)),
                    half.clone(),
                )
            };
            (side(1), side(-1))
        }
        GeomObject::Conic(c) => {
            let ((cx, cy), r2) = c
                .circle_params()
                .filter(|(_, r2)| r2.sign() == Sign::Positive)
                .ok_or_else(|| {
                    Stop::Aborted("can only force points on lines and circles".into())
                })?;
            let lo = rational_root_bound(&r2, true);
            let hi = rational_root_bound(&r2, false);
            let t2 = hint * hint;
            let den = Rational::one() + &t2;
            let e = ((Rational::one() - &t2) / &den, q(2) * hint / &den);
            let radius = &lo / q(4);
            let inner = OpenSet::disc(
                offset((&cx, &cy), (&e.0, &e.1), &(&lo / q(2))),
                radius.clone(),
            );
            let outer = OpenSet::disc(offset((&cx, &cy), (&e.0, &e.1), &(&hi * q(2))), radius);
            (inner, outer)
        }
        _ => {
            return Err(Stop::Aborted(
                "can only force points on lines and circles".into(),
            ))
        }
    };
    let a = board.request(inner)?;
    let b = board.request(outer)?;
    let l = board.join(a, b)?;
    let hits = board.intersect(l, curve)?;
    let point = |id: ObjId| board.object(id).and_then(GeomObject::as_point).cloned();
    let (pa, pb) = (point(a).expect("point"), point(b).expect("point"));
    hits.iter()
        .copied()
        .find(|&h| point(h).is_some_and(|x| between(&pa, &x, &pb).unwrap_or(false)))
        .or_else(|| hits.first().copied())
        .ok_or_else(|| Stop::Aborted("forcing line missed the curve".into()))
}
