//! SVG snapshots of configurations.
//!
//! Coordinates are midpoints of dyadic enclosures at the requested
//! precision; lines are clipped exactly against the viewport before
//! approximation, so only the printed digits depend on the precision.

use std::fmt::Write;

use rulerlab::closure::Configuration;
use rulerlab::geometry::{label_order, GeomObject, HLine, HPoint};
use rulerlab::numbers::{Constructible, Rational};

const MARGIN: f64 = 1.0;
/// Viewport side in SVG user units.
const SIZE: f64 = 800.0;

struct View {
    x0: Constructible,
    x1: Constructible,
    y0: Constructible,
    y1: Constructible,
}

struct Pen {
    digits: usize,
    precision: u32,
}

impl Pen {
    fn num(&self, x: &Constructible) -> String {
        x.approx(self.precision).midpoint_decimal(self.digits)
    }
}

fn int(n: f64) -> Constructible {
    Constructible::rational(Rational::from_integer((n as i64).into()))
}

/// Integer box around every finite point and circle, plus a margin.
fn viewport(cfg: &Configuration) -> View {
    let (mut lo_x, mut hi_x, mut lo_y, mut hi_y) = (-1.0f64, 1.0f64, -1.0f64, 1.0f64);
    let mut grow = |x: f64, y: f64, r: f64| {
        if x.is_finite() && y.is_finite() && r.is_finite() && x.abs().max(y.abs()) + r < 1e6 {
            lo_x = lo_x.min(x - r);
            hi_x = hi_x.max(x + r);
            lo_y = lo_y.min(y - r);
            hi_y = hi_y.max(y + r);
        }
    };
    for e in cfg.entries() {
        match &e.object {
            GeomObject::Point(p) => {
                if let Some((x, y)) = p.to_affine_f64() {
                    grow(x, y, 0.0);
                }
            }
            GeomObject::Conic(c) => {
                if let Some(((cx, cy), r2)) = c.circle_params() {
                    grow(cx.to_f64(), cy.to_f64(), r2.to_f64().sqrt());
                }
            }
            GeomObject::Line(_) => {}
        }
    }
    View {
        x0: int((lo_x - MARGIN).floor()),
        x1: int((hi_x + MARGIN).ceil()),
        y0: int((lo_y - MARGIN).floor()),
        y1: int((hi_y + MARGIN).ceil()),
    }
}

/// The segment of `l` inside the viewport, if any.
fn clip(l: &HLine, v: &View) -> Option<(HPoint, HPoint)> {
    if l.is_at_infinity() {
        return None;
    }
    let [a, b, c] = l.coords();
    let mut hits: Vec<HPoint> = Vec::new();
    let mut push = |p: HPoint| {
        if !hits.contains(&p) {
            hits.push(p);
        }
    };
    if !b.is_zero() {
        for x in [&v.x0, &v.x1] {
            let y = (&(a * x) + c).checked_div(b).ok()?;
            let y = -&y;
            if v.y0 <= y && y <= v.y1 {
                push(HPoint::affine(x.clone(), y));
            }
        }
    }
    if !a.is_zero() {
        for y in [&v.y0, &v.y1] {
            let x = (&(b * y) + c).checked_div(a).ok()?;
            let x = -&x;
            if v.x0 <= x && x <= v.x1 {
                push(HPoint::affine(x, y.clone()));
            }
        }
    }
    hits.sort_by(label_order);
    match hits.len() {
        0 | 1 => None,
        n => Some((hits[0].clone(), hits[n - 1].clone())),
    }
}

/// Renders `cfg` with `marked` points drawn in a second color.
pub fn svg(cfg: &Configuration, marked: &[GeomObject], precision: u32) -> String {
    let v = viewport(cfg);
    let pen = Pen {
        digits: ((precision as f64 * std::f64::consts::LOG10_2).ceil() as usize).max(1),
        precision,
    };
    let width = (&v.x1 - &v.x0).to_f64();
    let height = (&v.y1 - &v.y0).to_f64();
    let scale = SIZE / width.max(height);
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="{} {} {} {}">"#,
        (width * scale).round(),
        (height * scale).round(),
        pen.num(&v.x0),
        pen.num(&-&v.y1),
        pen.num(&(&v.x1 - &v.x0)),
        pen.num(&(&v.y1 - &v.y0)),
    )
    .unwrap();
    // flip so that y grows upwards
    out.push_str(r#"<g transform="scale(1,-1)" fill="none" stroke="black" vector-effect="non-scaling-stroke" stroke-width="0.01">"#);
    out.push('\n');
    let dot = Constructible::ratio(1, 40);
    let mut points = String::new();
    for (id, e) in cfg.entries().iter().enumerate() {
        match &e.object {
            GeomObject::Line(l) => {
                if let Some((p, q)) = clip(l, &v) {
                    let (x1, y1) = p.to_affine().unwrap();
                    let (x2, y2) = q.to_affine().unwrap();
                    writeln!(
                        out,
                        r#"<line id="o{id}" x1="{}" y1="{}" x2="{}" y2="{}" stroke="gray"/>"#,
                        pen.num(&x1),
                        pen.num(&y1),
                        pen.num(&x2),
                        pen.num(&y2)
                    )
                    .unwrap();
                }
            }
            GeomObject::Conic(c) => match c.circle_params() {
                Some(((cx, cy), r2)) => {
                    let r = cfg
                        .tower()
                        .try_sqrt(&r2)
                        .map(|r| pen.num(&r))
                        .unwrap_or_else(|| {
                            format!("{:.*}", pen.digits.min(15), r2.to_f64().sqrt())
                        });
                    writeln!(
                        out,
                        r#"<circle id="o{id}" cx="{}" cy="{}" r="{r}" stroke="blue"/>"#,
                        pen.num(&cx),
                        pen.num(&cy)
                    )
                    .unwrap();
                }
                None => writeln!(out, "<!-- o{id}: {c} is not a circle -->").unwrap(),
            },
            GeomObject::Point(p) => {
                let Some((x, y)) = p.to_affine() else {
                    continue;
                };
                let color = if marked.contains(&e.object) {
                    "red"
                } else {
                    "black"
                };
                writeln!(
                    points,
                    r#"<circle id="o{id}" cx="{}" cy="{}" r="{}" fill="{color}" stroke="none"/>"#,
                    pen.num(&x),
                    pen.num(&y),
                    pen.num(&dot)
                )
                .unwrap();
            }
        }
    }
    out.push_str(&points);
    out.push_str("</g>\n</svg>\n");
    out
}
