use std::collections::VecDeque;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::closure::Configuration;
use crate::geometry::{HPoint, ProjMap};
use crate::numbers::{Constructible, Rational, Sign};

use super::{OpenSet, Region};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum AdversaryError {
    #[error("search budget exceeded: {0}")]
    SearchBudgetExceeded(String),
    #[error("unsupported open set: {0}")]
    Unsupported(String),
    #[error("no recorded answer left")]
    Exhausted,
}

/// Bob: answers open-set requests.
pub trait Adversary {
    /// One-line description recorded in traces.
    fn describe(&self) -> String;

    /// A point strictly inside `set`.
    fn choose_point(
        &mut self,
        set: &OpenSet,
        cfg: &Configuration,
    ) -> Result<HPoint, AdversaryError>;
}

const SEARCH_BUDGET: usize = 400_000;
const STERN_BROCOT_BUDGET: usize = 3_000;

fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn rational_point(x: &Rational, y: &Rational) -> HPoint {
    HPoint::affine(
        Constructible::rational(x.clone()),
        Constructible::rational(y.clone()),
    )
}

/// `[xmin, xmax, ymin, ymax]` of the discs of a set, slightly widened.
fn disc_box(set: &OpenSet) -> Result<[f64; 4], AdversaryError> {
    let mut b = [
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
    ];
    let mut any = false;
    for a in &set.atoms {
        match a {
            Region::Disc { center, radius } => {
                let (cx, cy) = center
                    .to_affine_f64()
                    .ok_or_else(|| AdversaryError::Unsupported("disc center at infinity".into()))?;
                let r = crate::numbers::Constructible::rational(radius.clone()).to_f64();
                b = [
                    b[0].max(cx - r),
                    b[1].min(cx + r),
                    b[2].max(cy - r),
                    b[3].min(cy + r),
                ];
                any = true;
            }
            Region::HalfPlane { .. } => {}
            Region::Preimage { .. } => {
                return Err(AdversaryError::Unsupported("preimage regions".into()));
            }
        }
    }
    if !any {
        return Err(AdversaryError::Unsupported("no disc".into()));
    }
    Ok(widen(b))
}

fn widen(b: [f64; 4]) -> [f64; 4] {
    let m = |v: f64| 1e-9 * (1.0 + v.abs());
    [
        b[0] - m(b[0]),
        b[1] + m(b[1]),
        b[2] - m(b[2]),
        b[3] + m(b[3]),
    ]
}

fn matrix_f64(map: &ProjMap) -> [[f64; 3]; 3] {
    let m = map.matrix();
    std::array::from_fn(|i| std::array::from_fn(|j| m[i][j].to_f64()))
}

fn apply_f64(m: &[[f64; 3]; 3], x: f64, y: f64) -> (f64, f64, f64) {
    let v = [x, y, 1.0];
    let r: [f64; 3] = std::array::from_fn(|i| m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2]);
    (r[0], r[1], r[2])
}

/// Rationals of height exactly `h` (max of |numerator| and denominator) in
/// `[lo, hi]`, ascending.
fn rationals_of_height(lo: f64, hi: f64, h: i64) -> Vec<Rational> {
    let mut out = Vec::new();
    let hf = h as f64;
    let (plo, phi) = ((lo * hf).ceil().max(-hf), (hi * hf).floor().min(hf));
    if plo <= phi {
        for p in plo as i64..=phi as i64 {
            if p.gcd(&h) == 1 {
                out.push(ratio(p, h));
            }
        }
    }
    // numerator ±h over a smaller denominator
    for sign in [1i64, -1] {
        let (a, b) = if sign == 1 { (lo, hi) } else { (-hi, -lo) };
        if b <= 0.0 {
            continue;
        }
        let qmin = (hf / b).ceil().max(1.0) as i64;
        let qmax = if a > 0.0 {
            ((hf / a).floor() as i64).min(h - 1)
        } else {
            h - 1
        };
        for q in qmin..=qmax {
            if q.gcd(&h) == 1 {
                out.push(ratio(sign * h, q));
            }
        }
    }
    out.sort();
    out
}

/// First rational point `r` (by height, then `x`, then `y`) whose preimage
/// `inverse(r)` lies in `set` and is not guarded. Returns `r` and the preimage.
fn enumerate_by_height(
    set: &OpenSet,
    inverse: Option<&ProjMap>,
    guards: &[HPoint],
    budget: usize,
) -> Result<(Rational, Rational, HPoint), AdversaryError> {
    let ubox = disc_box(set)?;
    let discs: Vec<(f64, f64, f64)> = set
        .atoms
        .iter()
        .filter_map(|a| match a {
            Region::Disc { center, radius } => {
                let (cx, cy) = center.to_affine_f64()?;
                Some((cx, cy, Constructible::rational(radius.clone()).to_f64()))
            }
            _ => None,
        })
        .collect();
    let fwd = inverse.map(|m| matrix_f64(&m.inverse()));
    let inv = inverse.map(matrix_f64);
    let rbox = match &fwd {
        None => ubox,
        Some(m) => {
            let corners = [
                (ubox[0], ubox[2]),
                (ubox[0], ubox[3]),
                (ubox[1], ubox[2]),
                (ubox[1], ubox[3]),
            ];
            let imgs: Vec<(f64, f64, f64)> =
                corners.iter().map(|&(x, y)| apply_f64(m, x, y)).collect();
            let scale = imgs.iter().map(|v| v.2.abs()).fold(0.0, f64::max);
            if imgs.iter().any(|v| v.2.abs() < 1e-9 * scale.max(1.0))
                || !(imgs.iter().all(|v| v.2 > 0.0) || imgs.iter().all(|v| v.2 < 0.0))
            {
                return Err(AdversaryError::Unsupported(
                    "open set meets the line mapped to infinity".into(),
                ));
            }
            let pts: Vec<(f64, f64)> = imgs.iter().map(|v| (v.0 / v.2, v.1 / v.2)).collect();
            widen([
                pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min),
                pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max),
                pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min),
                pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max),
            ])
        }
    };
    // numeric pre-filter; the exact test decides
    let maybe_inside = |x: f64, y: f64| {
        let (px, py) = match &inv {
            None => (x, y),
            Some(m) => {
                let (a, b, c) = apply_f64(m, x, y);
                if c == 0.0 {
                    return true;
                }
                (a / c, b / c)
            }
        };
        discs.iter().all(|&(cx, cy, r)| {
            let d2 = (px - cx).powi(2) + (py - cy).powi(2);
            d2 <= r * r * (1.0 + 1e-6) + 1e-12
        })
    };
    let mut xs: Vec<Rational> = Vec::new();
    let mut ys: Vec<Rational> = Vec::new();
    let mut tested = 0usize;
    for h in 1i64.. {
        let nx = rationals_of_height(rbox[0], rbox[1], h);
        let ny = rationals_of_height(rbox[2], rbox[3], h);
        let mut cands: Vec<(&Rational, &Rational)> = Vec::new();
        for x in &nx {
            for y in ys.iter().chain(&ny) {
                cands.push((x, y));
            }
        }
        for x in &xs {
            for y in &ny {
                cands.push((x, y));
            }
        }
        cands.sort();
        for (x, y) in cands {
            tested += 1;
            if tested > budget {
                return Err(AdversaryError::SearchBudgetExceeded(format!(
                    "{budget} candidates"
                )));
            }
            if !maybe_inside(rational_to_f64(x), rational_to_f64(y)) {
                continue;
            }
            let r = rational_point(x, y);
            if guards.contains(&r) {
                continue;
            }
            let p = match inverse {
                None => r,
                Some(m) => m.map_point(&r),
            };
            if set.contains(&p) {
                return Ok((x.clone(), y.clone(), p));
            }
        }
        xs.extend(nx);
        xs.sort();
        ys.extend(ny);
        ys.sort();
    }
    unreachable!()
}

fn rational_to_f64(q: &Rational) -> f64 {
    Constructible::rational(q.clone()).to_f64()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    Below,
    Inside,
    Above,
    Empty,
}

/// Stern–Brocot descent to the simplest rational for which `probe` answers
/// `Inside`. `probe` must be monotone: `Below` on a prefix, `Above` on a
/// suffix. Runs of equal turns are crossed by galloping.
fn simplest(
    mut probe: impl FnMut(&Rational) -> Side,
    budget: usize,
) -> Result<Option<Rational>, AdversaryError> {
    let mut left = budget;
    let mut eval = |p: &BigInt, q: &BigInt| -> Result<Side, AdversaryError> {
        if left == 0 {
            return Err(AdversaryError::SearchBudgetExceeded(format!(
                "{budget} Stern-Brocot steps"
            )));
        }
        left -= 1;
        Ok(probe(&Rational::new(p.clone(), q.clone())))
    };
    let zero = BigInt::zero;
    let one = BigInt::one;
    let (mut lp, mut lq, mut rp, mut rq) = match eval(&zero(), &one())? {
        Side::Inside => return Ok(Some(Rational::zero())),
        Side::Empty => return Ok(None),
        Side::Below => (zero(), one(), one(), zero()),
        Side::Above => (-one(), zero(), zero(), one()),
    };
    loop {
        let (mp, mq) = (&lp + &rp, &lq + &rq);
        let side = eval(&mp, &mq)?;
        match side {
            Side::Inside => return Ok(Some(Rational::new(mp, mq))),
            Side::Empty => return Ok(None),
            Side::Below | Side::Above => {
                // mediants along the run: base + k·other for k = 1, 2, ...
                let (bp, bq, op, oq) = if side == Side::Below {
                    (&lp, &lq, &rp, &rq)
                } else {
                    (&rp, &rq, &lp, &lq)
                };
                let at = |k: &BigInt| (bp + k * op, bq + k * oq);
                let mut lo = one();
                let mut hi = BigInt::from(2);
                loop {
                    let (p, q) = at(&hi);
                    match eval(&p, &q)? {
                        Side::Empty => return Ok(None),
                        s if s == side => {
                            lo = hi.clone();
                            hi *= 2;
                        }
                        _ => break,
                    }
                }
                while &hi - &lo > one() {
                    let mid: BigInt = (&lo + &hi) / 2;
                    let (p, q) = at(&mid);
                    match eval(&p, &q)? {
                        Side::Empty => return Ok(None),
                        s if s == side => lo = mid,
                        _ => hi = mid,
                    }
                }
                let (np, nq) = at(&lo);
                if side == Side::Below {
                    (lp, lq) = (np, nq);
                } else {
                    (rp, rq) = (np, nq);
                }
            }
        }
    }
}

/// Where `y` sits relative to the vertical slice of `set` at `x`.
fn slice_side(set: &OpenSet, x: &Constructible, y: &Rational) -> Side {
    let yc = Constructible::rational(y.clone());
    let (mut below, mut above) = (false, false);
    for a in &set.atoms {
        match a {
            Region::Disc { center, radius } => {
                let Some((cx, cy)) = center.to_affine() else {
                    return Side::Empty;
                };
                let r2 = Constructible::rational(radius * radius);
                let dx2 = (x - &cx).square();
                if (&dx2 - &r2).sign() != Sign::Negative {
                    return Side::Empty;
                }
                let dy = &yc - &cy;
                if (&(&dx2 + &dy.square()) - &r2).sign() == Sign::Negative {
                    continue;
                }
                match dy.sign() {
                    Sign::Negative => below = true,
                    Sign::Positive => above = true,
                    Sign::Zero => return Side::Empty,
                }
            }
            Region::HalfPlane { line, positive } => {
                let want = if *positive {
                    Sign::Positive
                } else {
                    Sign::Negative
                };
                if line.eval_affine(x, &yc).sign() == want {
                    continue;
                }
                match line.coords()[1].sign() {
                    Sign::Zero => return Side::Empty,
                    s => {
                        if (s == Sign::Positive) == *positive {
                            below = true;
                        } else {
                            above = true;
                        }
                    }
                }
            }
            Region::Preimage { .. } => return Side::Empty,
        }
    }
    match (below, above) {
        (true, true) => Side::Empty,
        (true, false) => Side::Below,
        (false, true) => Side::Above,
        (false, false) => Side::Inside,
    }
}

/// Answers with the point of minimal denominators: the simplest `x` (in the
/// Stern–Brocot sense) over which the set has points, then the simplest `y`
/// above it.
#[derive(Clone, Debug, Default)]
pub struct RationalAdversary;

impl RationalAdversary {
    pub fn new() -> Self {
        RationalAdversary
    }
}

impl Adversary for RationalAdversary {
    fn describe(&self) -> String {
        "rational".into()
    }

    fn choose_point(
        &mut self,
        set: &OpenSet,
        _cfg: &Configuration,
    ) -> Result<HPoint, AdversaryError> {
        // any interior point fixes the direction toward the x-projection
        let (xs, ys, _) = enumerate_by_height(set, None, &[], SEARCH_BUDGET)?;
        let mut found: Option<(Rational, Rational)> = None;
        let x = simplest(
            |x| {
                let xc = Constructible::rational(x.clone());
                match simplest(|y| slice_side(set, &xc, y), STERN_BROCOT_BUDGET) {
                    Ok(Some(y)) => {
                        found = Some((x.clone(), y));
                        Side::Inside
                    }
                    _ if *x == xs => {
                        found = Some((x.clone(), ys.clone()));
                        Side::Inside
                    }
                    _ if *x < xs => Side::Below,
                    _ => Side::Above,
                }
            },
            STERN_BROCOT_BUDGET,
        )?;
        let (fx, fy) = found.expect("inside point recorded");
        debug_assert_eq!(Some(&fx), x.as_ref());
        let p = rational_point(&fx, &fy);
        if !set.contains(&p) {
            return Err(AdversaryError::SearchBudgetExceeded(
                "no certified point".into(),
            ));
        }
        Ok(p)
    }
}

/// Answers `U` with `T⁻¹(r)` for the first rational point `r` (by height)
/// whose preimage lies in `U`, skipping guarded images. Every answer has a
/// rational `T`-image. The image of the center, `T(0, 0)`, is guarded from
/// the start.
#[derive(Clone, Debug)]
pub struct PullbackAdversary {
    map: ProjMap,
    inverse: ProjMap,
    guards: Vec<HPoint>,
}

impl PullbackAdversary {
    pub fn new(map: ProjMap) -> Self {
        let center = map.map_point(&HPoint::from_ratios((0, 1), (0, 1)));
        PullbackAdversary {
            inverse: map.inverse(),
            map,
            guards: vec![center],
        }
    }

    pub fn map(&self) -> &ProjMap {
        &self.map
    }

    pub fn guards(&self) -> &[HPoint] {
        &self.guards
    }

    /// Never answer with a point whose image is `image`.
    pub fn forbid(&mut self, image: HPoint) {
        self.guards.push(image);
    }
}

impl Adversary for PullbackAdversary {
    fn describe(&self) -> String {
        format!("pullback {}", self.map)
    }

    fn choose_point(
        &mut self,
        set: &OpenSet,
        _cfg: &Configuration,
    ) -> Result<HPoint, AdversaryError> {
        let (_, _, p) = enumerate_by_height(set, Some(&self.inverse), &self.guards, SEARCH_BUDGET)?;
        Ok(p)
    }
}

/// Replays recorded answers in order.
#[derive(Clone, Debug)]
pub struct ReplayAdversary {
    description: String,
    answers: VecDeque<HPoint>,
}

impl ReplayAdversary {
    pub fn new(description: impl Into<String>, answers: impl IntoIterator<Item = HPoint>) -> Self {
        ReplayAdversary {
            description: description.into(),
            answers: answers.into_iter().collect(),
        }
    }
}

impl Adversary for ReplayAdversary {
    fn describe(&self) -> String {
        self.description.clone()
    }

    fn choose_point(
        &mut self,
        _set: &OpenSet,
        _cfg: &Configuration,
    ) -> Result<HPoint, AdversaryError> {
        self.answers.pop_front().ok_or(AdversaryError::Exhausted)
    }
}
