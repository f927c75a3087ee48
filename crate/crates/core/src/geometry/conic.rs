use crate::numbers::{Constructible, Sign, Tower};

use super::{label_order, Conic, Coords, GeomError, HLine, HPoint};

fn scaled_sum(s: &Constructible, p: &Coords, t: &Constructible, q: &Coords) -> Coords {
    std::array::from_fn(|i| &(s * &p[i]) + &(t * &q[i]))
}

/// Two points spanning `l`: a finite point and the direction at infinity.
fn line_frame(l: &HLine) -> (Coords, Coords) {
    let [a, b, c] = l.coords();
    let zero = Constructible::zero;
    if l.is_at_infinity() {
        return (
            [Constructible::one(), zero(), zero()],
            [zero(), Constructible::one(), zero()],
        );
    }
    let dir = [b.clone(), -a, zero()];
    let base = if a.sign() != Sign::Zero {
        [-(c * &a.recip().unwrap()), zero(), Constructible::one()]
    } else {
        [zero(), -(c * &b.recip().unwrap()), Constructible::one()]
    };
    (base, dir)
}

/// Real intersection points of a line and a conic, in labeling order.
pub fn line_conic_intersections(
    tower: &Tower,
    l: &HLine,
    conic: &Conic,
) -> Result<Vec<HPoint>, GeomError> {
    let (p, q) = line_frame(l);
    // X = s·P + t·Q  gives  s²·cpp + 2st·bpq + t²·aqq = 0
    let aqq = conic.bilinear(&q, &q);
    let bpq = conic.bilinear(&p, &q);
    let cpp = conic.bilinear(&p, &p);
    let mut points = Vec::new();
    match aqq.sign() {
        Sign::Zero => {
            if bpq.sign() == Sign::Zero && cpp.sign() == Sign::Zero {
                return Err(GeomError::LineInConic);
            }
            points.push(HPoint::new_from(q.clone())?);
            let two_b = &bpq * &Constructible::integer(2);
            if bpq.sign() != Sign::Zero {
                points.push(HPoint::new_from(scaled_sum(&two_b, &p, &-&cpp, &q))?);
            }
        }
        _ => {
            let disc = &bpq.square() - &(&aqq * &cpp);
            match disc.sign() {
                Sign::Negative => {}
                Sign::Zero => points.push(HPoint::new_from(scaled_sum(&aqq, &p, &-&bpq, &q))?),
                Sign::Positive => {
                    let root = tower.sqrt(&disc)?;
                    for t in [&-&bpq + &root, &-&bpq - &root] {
                        points.push(HPoint::new_from(scaled_sum(&aqq, &p, &t, &q))?);
                    }
                }
            }
        }
    }
    points.sort_by(label_order);
    Ok(points)
}

/// Circle centered at `center` with radius `|ab|`.
pub fn circle_from(center: &HPoint, a: &HPoint, b: &HPoint) -> Result<Conic, GeomError> {
    let (cx, cy) = center.to_affine().ok_or(GeomError::InfinitePoint)?;
    let (ax, ay) = a.to_affine().ok_or(GeomError::InfinitePoint)?;
    let (bx, by) = b.to_affine().ok_or(GeomError::InfinitePoint)?;
    let r2 = &(&ax - &bx).square() + &(&ay - &by).square();
    if r2.sign() == Sign::Zero {
        return Err(GeomError::DegenerateRadius);
    }
    let m33 = &(&cx.square() + &cy.square()) - &r2;
    Conic::from_upper([
        Constructible::one(),
        Constructible::zero(),
        -&cx,
        Constructible::one(),
        -&cy,
        m33,
    ])
}

/// Common real points of two circles via their radical axis.
pub fn circle_circle_intersections(
    tower: &Tower,
    c1: &Conic,
    c2: &Conic,
) -> Result<Vec<HPoint>, GeomError> {
    if !c1.is_circle() || !c2.is_circle() {
        return Err(GeomError::NotACircle);
    }
    let d13 = &c1.upper()[2] - &c2.upper()[2];
    let d23 = &c1.upper()[4] - &c2.upper()[4];
    let d33 = &c1.upper()[5] - &c2.upper()[5];
    if d13.sign() == Sign::Zero && d23.sign() == Sign::Zero {
        return Err(if d33.sign() == Sign::Zero {
            GeomError::IdenticalCircles
        } else {
            GeomError::ConcentricCircles
        });
    }
    let two = Constructible::integer(2);
    let axis = HLine::new(&two * &d13, &two * &d23, d33)?;
    line_conic_intersections(tower, &axis, c1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::on_conic;

    fn circle(cx: i64, cy: i64, r: i64) -> Conic {
        circle_from(
            &HPoint::from_ratios((cx, 1), (cy, 1)),
            &HPoint::from_ratios((0, 1), (0, 1)),
            &HPoint::from_ratios((r, 1), (0, 1)),
        )
        .unwrap()
    }

    #[test]
    fn line_meets_unit_circle() {
        let t = Tower::new();
        let c = Conic::unit_circle();
        let x_axis = HLine::new(0.into(), 1.into(), 0.into()).unwrap();
        let pts = line_conic_intersections(&t, &x_axis, &c).unwrap();
        assert_eq!(pts.len(), 2);
        assert!(pts[0] == HPoint::from_ratios((-1, 1), (0, 1)));
        assert!(pts[1] == HPoint::from_ratios((1, 1), (0, 1)));

        let tangent = HLine::new(1.into(), 0.into(), (-1).into()).unwrap();
        let pts = line_conic_intersections(&t, &tangent, &c).unwrap();
        assert_eq!(pts.len(), 1);
        assert!(pts[0] == HPoint::from_ratios((1, 1), (0, 1)));

        let half = HLine::new(1.into(), 0.into(), Constructible::ratio(-1, 2)).unwrap();
        let pts = line_conic_intersections(&t, &half, &c).unwrap();
        assert_eq!(pts.len(), 2);
        let r3 = t.sqrt(&Constructible::integer(3)).unwrap();
        let h = &r3 * &Constructible::ratio(1, 2);
        assert!(pts[0] == HPoint::affine(Constructible::ratio(1, 2), -&h));
        assert!(pts[1] == HPoint::affine(Constructible::ratio(1, 2), h));
        for p in &pts {
            assert!(on_conic(p, &c));
        }
        let far = HLine::new(1.into(), 0.into(), (-2).into()).unwrap();
        assert!(line_conic_intersections(&t, &far, &c).unwrap().is_empty());
        assert!(line_conic_intersections(&t, &HLine::at_infinity(), &c)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn line_inside_degenerate_conic() {
        // x·y = 0 contains the x-axis
        let t = Tower::new();
        let pair = Conic::from_upper([0, 1, 0, 0, 0, 0].map(Constructible::integer)).unwrap();
        let x_axis = HLine::new(0.into(), 1.into(), 0.into()).unwrap();
        assert_eq!(
            line_conic_intersections(&t, &x_axis, &pair).unwrap_err(),
            GeomError::LineInConic
        );
    }

    #[test]
    fn compass_examples() {
        let unit = circle(0, 0, 1);
        assert!(unit == Conic::unit_circle());
        let shifted = circle(1, 0, 1);
        let expected = Conic::from_upper([1, 0, -1, 1, 0, 0].map(Constructible::integer)).unwrap();
        assert!(shifted == expected);
        let p = HPoint::from_ratios((1, 1), (1, 1));
        assert_eq!(
            circle_from(&p, &p, &p).unwrap_err(),
            GeomError::DegenerateRadius
        );
        let inf = HPoint::new(1.into(), 0.into(), 0.into()).unwrap();
        assert_eq!(
            circle_from(&inf, &p, &HPoint::from_ratios((0, 1), (0, 1))).unwrap_err(),
            GeomError::InfinitePoint
        );
    }

    #[test]
    fn circle_pairs() {
        let t = Tower::new();
        let unit = Conic::unit_circle();
        let pts = circle_circle_intersections(&t, &unit, &circle(1, 0, 1)).unwrap();
        assert_eq!(pts.len(), 2);
        let r3 = t.sqrt(&Constructible::integer(3)).unwrap();
        let h = &r3 * &Constructible::ratio(1, 2);
        assert!(pts[0] == HPoint::affine(Constructible::ratio(1, 2), -&h));
        assert!(pts[1] == HPoint::affine(Constructible::ratio(1, 2), h));
        assert!(circle_circle_intersections(&t, &unit, &circle(3, 0, 1))
            .unwrap()
            .is_empty());
        let touch = circle_circle_intersections(&t, &unit, &circle(2, 0, 1)).unwrap();
        assert_eq!(touch.len(), 1);
        assert!(touch[0] == HPoint::from_ratios((1, 1), (0, 1)));
        assert_eq!(
            circle_circle_intersections(&t, &unit, &unit).unwrap_err(),
            GeomError::IdenticalCircles
        );
        assert_eq!(
            circle_circle_intersections(&t, &unit, &circle(0, 0, 2)).unwrap_err(),
            GeomError::ConcentricCircles
        );
    }
}
