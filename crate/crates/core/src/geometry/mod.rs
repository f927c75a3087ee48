//! Projective plane over constructible reals.
//!
//! Points, lines and conics are stored in homogeneous coordinates in a
//! canonical form (first nonzero coordinate scaled to 1), so projective
//! equality is coordinate-wise exact equality.

mod conic;
mod map;
mod text;

pub use conic::{circle_circle_intersections, circle_from, line_conic_intersections};
pub use map::{circle_preserving_map, ProjMap};

use std::cmp::Ordering;
use std::fmt;

use crate::numbers::{Constructible, NumError, Sign};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GeomError {
    #[error("points coincide")]
    CoincidentPoints,
    #[error("lines coincide")]
    CoincidentLines,
    #[error("line is a component of the conic")]
    LineInConic,
    #[error("radius is zero")]
    DegenerateRadius,
    #[error("point at infinity where a finite point is required")]
    InfinitePoint,
    #[error("circles are concentric")]
    ConcentricCircles,
    #[error("circles are identical")]
    IdenticalCircles,
    #[error("conic is not a circle")]
    NotACircle,
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("all homogeneous coordinates are zero")]
    ZeroVector,
    #[error("map is singular")]
    SingularMap,
    #[error("points are not collinear")]
    NotCollinear,
    #[error("malformed object: {0}")]
    Parse(String),
    #[error(transparent)]
    Num(#[from] NumError),
}

pub type Coords = [Constructible; 3];

/// Scales `v` so that its first nonzero entry is exactly 1.
fn canonical<const N: usize>(v: [Constructible; N]) -> Result<[Constructible; N], GeomError> {
    let lead = v
        .iter()
        .position(|x| x.sign() != Sign::Zero)
        .ok_or(GeomError::ZeroVector)?;
    let inv = v[lead].recip()?;
    let mut out = v;
    for (i, x) in out.iter_mut().enumerate() {
        *x = match i.cmp(&lead) {
            Ordering::Less => Constructible::zero(),
            Ordering::Equal => Constructible::one(),
            Ordering::Greater => &*x * &inv,
        };
    }
    Ok(out)
}

fn coords_eq<const N: usize>(a: &[Constructible; N], b: &[Constructible; N]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).sign() == Sign::Zero)
}

pub(crate) fn cross(u: &Coords, v: &Coords) -> Coords {
    [
        &(&u[1] * &v[2]) - &(&u[2] * &v[1]),
        &(&u[2] * &v[0]) - &(&u[0] * &v[2]),
        &(&u[0] * &v[1]) - &(&u[1] * &v[0]),
    ]
}

pub(crate) fn dot(u: &Coords, v: &Coords) -> Constructible {
    &(&(&u[0] * &v[0]) + &(&u[1] * &v[1])) + &(&u[2] * &v[2])
}

/// Projective point `[x : y : z]`; `z = 0` is a point at infinity.
#[derive(Clone)]
pub struct HPoint(Coords);

/// Line `a·x + b·y + c·z = 0`; `[0 : 0 : 1]` is the line at infinity.
#[derive(Clone)]
pub struct HLine(Coords);

impl HPoint {
    pub fn new(x: Constructible, y: Constructible, z: Constructible) -> Result<Self, GeomError> {
        Ok(HPoint(canonical([x, y, z])?))
    }

    pub fn affine(x: Constructible, y: Constructible) -> Self {
        HPoint::new(x, y, Constructible::one()).expect("affine point has z = 1")
    }

    /// Affine point from small integers or ratios, mostly for tests.
    pub fn from_ratios(x: (i64, i64), y: (i64, i64)) -> Self {
        HPoint::affine(
            Constructible::ratio(x.0, x.1),
            Constructible::ratio(y.0, y.1),
        )
    }

    pub fn coords(&self) -> &Coords {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0[2].sign() != Sign::Zero
    }

    /// Affine coordinates `(x/z, y/z)`, or `None` at infinity.
    pub fn to_affine(&self) -> Option<(Constructible, Constructible)> {
        let inv = self.0[2].recip().ok()?;
        Some((&self.0[0] * &inv, &self.0[1] * &inv))
    }

    pub fn to_affine_f64(&self) -> Option<(f64, f64)> {
        self.to_affine().map(|(x, y)| (x.to_f64(), y.to_f64()))
    }
}

impl HLine {
    pub fn new(a: Constructible, b: Constructible, c: Constructible) -> Result<Self, GeomError> {
        Ok(HLine(canonical([a, b, c])?))
    }

    pub fn at_infinity() -> Self {
        HLine([
            Constructible::zero(),
            Constructible::zero(),
            Constructible::one(),
        ])
    }

    pub fn coords(&self) -> &Coords {
        &self.0
    }

    pub fn is_at_infinity(&self) -> bool {
        self.0[0].sign() == Sign::Zero && self.0[1].sign() == Sign::Zero
    }

    /// `a·x + b·y + c` at an affine point.
    pub fn eval_affine(&self, x: &Constructible, y: &Constructible) -> Constructible {
        &(&(&self.0[0] * x) + &(&self.0[1] * y)) + &self.0[2]
    }
}

impl PartialEq for HPoint {
    fn eq(&self, other: &Self) -> bool {
        coords_eq(&self.0, &other.0)
    }
}

impl PartialEq for HLine {
    fn eq(&self, other: &Self) -> bool {
        coords_eq(&self.0, &other.0)
    }
}

/// Symmetric 3×3 matrix of a point conic `xᵀ M x = 0`, stored as the upper
/// triangle `m11 m12 m13 m22 m23 m33`.
#[derive(Clone)]
pub struct Conic([Constructible; 6]);

impl Conic {
    pub fn from_upper(m: [Constructible; 6]) -> Result<Self, GeomError> {
        Ok(Conic(canonical(m)?))
    }

    pub fn unit_circle() -> Self {
        Conic([
            Constructible::one(),
            Constructible::zero(),
            Constructible::zero(),
            Constructible::one(),
            Constructible::zero(),
            Constructible::integer(-1),
        ])
    }

    pub fn upper(&self) -> &[Constructible; 6] {
        &self.0
    }

    /// Entry `(i, j)` of the full symmetric matrix, zero-based.
    pub fn entry(&self, i: usize, j: usize) -> &Constructible {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let idx = match (i, j) {
            (0, 0) => 0,
            (0, 1) => 1,
            (0, 2) => 2,
            (1, 1) => 3,
            (1, 2) => 4,
            _ => 5,
        };
        &self.0[idx]
    }

    pub fn matrix(&self) -> [[Constructible; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.entry(i, j).clone()))
    }

    pub fn from_matrix(m: &[[Constructible; 3]; 3]) -> Result<Self, GeomError> {
        Conic::from_upper([
            m[0][0].clone(),
            m[0][1].clone(),
            m[0][2].clone(),
            m[1][1].clone(),
            m[1][2].clone(),
            m[2][2].clone(),
        ])
    }

    /// Bilinear form `pᵀ M q`.
    pub fn bilinear(&self, p: &Coords, q: &Coords) -> Constructible {
        let mut acc = Constructible::zero();
        for (i, pi) in p.iter().enumerate() {
            if pi.is_structurally_zero() {
                continue;
            }
            for (j, qj) in q.iter().enumerate() {
                if qj.is_structurally_zero() {
                    continue;
                }
                acc = &acc + &(&(pi * self.entry(i, j)) * qj);
            }
        }
        acc
    }

    /// Circle test: equal nonzero `xx`, `yy` coefficients, no `xy` term and
    /// at least one real point.
    pub fn is_circle(&self) -> bool {
        self.circle_params().is_some()
    }

    /// Center and squared radius, if this conic is a circle.
    pub fn circle_params(&self) -> Option<((Constructible, Constructible), Constructible)> {
        let [m11, m12, m13, m22, m23, m33] = &self.0;
        if m11.sign() == Sign::Zero || m12.sign() != Sign::Zero || (m11 - m22).sign() != Sign::Zero
        {
            return None;
        }
        // canonical form has m11 = 1
        let cx = -m13;
        let cy = -m23;
        let r2 = &(&cx.square() + &cy.square()) - m33;
        if r2.sign() == Sign::Negative {
            return None;
        }
        Some(((cx, cy), r2))
    }
}

impl PartialEq for Conic {
    fn eq(&self, other: &Self) -> bool {
        coords_eq(&self.0, &other.0)
    }
}

/// Any object a configuration can hold.
#[derive(Clone, PartialEq)]
pub enum GeomObject {
    Point(HPoint),
    Line(HLine),
    Conic(Conic),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ObjectKind {
    Point,
    Line,
    Conic,
}

impl GeomObject {
    pub fn kind(&self) -> ObjectKind {
        match self {
            GeomObject::Point(_) => ObjectKind::Point,
            GeomObject::Line(_) => ObjectKind::Line,
            GeomObject::Conic(_) => ObjectKind::Conic,
        }
    }

    /// Canonical coordinates, in storage order.
    pub fn coordinates(&self) -> &[Constructible] {
        match self {
            GeomObject::Point(p) => &p.0,
            GeomObject::Line(l) => &l.0,
            GeomObject::Conic(c) => &c.0,
        }
    }

    pub fn as_point(&self) -> Option<&HPoint> {
        match self {
            GeomObject::Point(p) => Some(p),
            _ => None,
        }
    }

    pub fn as_line(&self) -> Option<&HLine> {
        match self {
            GeomObject::Line(l) => Some(l),
            _ => None,
        }
    }

    pub fn as_conic(&self) -> Option<&Conic> {
        match self {
            GeomObject::Conic(c) => Some(c),
            _ => None,
        }
    }

    pub fn node_count(&self) -> usize {
        self.coordinates()
            .iter()
            .map(Constructible::node_count)
            .sum()
    }
}

impl From<HPoint> for GeomObject {
    fn from(p: HPoint) -> Self {
        GeomObject::Point(p)
    }
}

impl From<HLine> for GeomObject {
    fn from(l: HLine) -> Self {
        GeomObject::Line(l)
    }
}

impl From<Conic> for GeomObject {
    fn from(c: Conic) -> Self {
        GeomObject::Conic(c)
    }
}

/// Line through two distinct points.
pub fn join(p: &HPoint, q: &HPoint) -> Result<HLine, GeomError> {
    match HLine::new_from(cross(&p.0, &q.0)) {
        Err(GeomError::ZeroVector) => Err(GeomError::CoincidentPoints),
        other => other,
    }
}

/// Common point of two distinct lines; parallels meet at infinity.
pub fn meet(l: &HLine, m: &HLine) -> Result<HPoint, GeomError> {
    match HPoint::new_from(cross(&l.0, &m.0)) {
        Err(GeomError::ZeroVector) => Err(GeomError::CoincidentLines),
        other => other,
    }
}

impl HLine {
    fn new_from(v: Coords) -> Result<Self, GeomError> {
        Ok(HLine(canonical(v)?))
    }
}

impl HPoint {
    fn new_from(v: Coords) -> Result<Self, GeomError> {
        Ok(HPoint(canonical(v)?))
    }
}

pub fn on_line(p: &HPoint, l: &HLine) -> bool {
    dot(&p.0, &l.0).sign() == Sign::Zero
}

pub fn on_conic(p: &HPoint, c: &Conic) -> bool {
    c.bilinear(&p.0, &p.0).sign() == Sign::Zero
}

/// Carrier of an incidence test.
#[derive(Clone, Copy)]
pub enum Carrier<'a> {
    Line(&'a HLine),
    Conic(&'a Conic),
}

pub fn incident(p: &HPoint, carrier: Carrier<'_>) -> bool {
    match carrier {
        Carrier::Line(l) => on_line(p, l),
        Carrier::Conic(c) => on_conic(p, c),
    }
}

/// Affine parallelism: equal directions. The line at infinity is parallel
/// to every line.
pub fn parallel(l: &HLine, m: &HLine) -> bool {
    (&(&l.0[0] * &m.0[1]) - &(&l.0[1] * &m.0[0])).sign() == Sign::Zero
}

pub fn collinear(p: &HPoint, q: &HPoint, r: &HPoint) -> bool {
    dot(&cross(&p.0, &q.0), &r.0).sign() == Sign::Zero
}

/// Whether `q` lies strictly between `p` and `r`. The three points must be
/// finite and collinear.
pub fn between(p: &HPoint, q: &HPoint, r: &HPoint) -> Result<bool, GeomError> {
    let (px, py) = p.to_affine().ok_or(GeomError::InfinitePoint)?;
    let (qx, qy) = q.to_affine().ok_or(GeomError::InfinitePoint)?;
    let (rx, ry) = r.to_affine().ok_or(GeomError::InfinitePoint)?;
    if !collinear(p, q, r) {
        return Err(GeomError::NotCollinear);
    }
    let d = &(&(&qx - &px) * &(&rx - &qx)) + &(&(&qy - &py) * &(&ry - &qy));
    Ok(d.sign() == Sign::Positive)
}

/// Whether two finite points lie strictly on the same side of `l`.
pub fn same_side(p: &HPoint, q: &HPoint, l: &HLine) -> Result<bool, GeomError> {
    let (px, py) = p.to_affine().ok_or(GeomError::InfinitePoint)?;
    let (qx, qy) = q.to_affine().ok_or(GeomError::InfinitePoint)?;
    let sp = l.eval_affine(&px, &py).sign();
    let sq = l.eval_affine(&qx, &qy).sign();
    Ok(sp != Sign::Zero && sp == sq)
}

/// Deterministic labeling order for intersection results: finite points by
/// `(x, y)`, then points at infinity by direction `(a, b)`.
pub fn label_order(p: &HPoint, q: &HPoint) -> Ordering {
    match (p.to_affine(), q.to_affine()) {
        (Some((px, py)), Some((qx, qy))) => px.cmp(&qx).then_with(|| py.cmp(&qy)),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => p.0[0].cmp(&q.0[0]).then_with(|| p.0[1].cmp(&q.0[1])),
    }
}

impl fmt::Debug for HPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Debug for HLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Debug for Conic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Debug for GeomObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
