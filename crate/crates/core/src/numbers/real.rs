//! Values in a tower of real quadratic extensions of the rationals.
//!
//! A [`Constructible`] is either a rational leaf or a pair `(a, b)` attached to
//! a tower level `k`, denoting `a + b·√r_k` where `a`, `b` and the radicand
//! `r_k` all live strictly below level `k`. Equality is decided by the exact
//! sign of the difference, so redundant levels (say `√4`) only cost space.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::interval::{self, DyadicInterval};
use super::{NumError, Rational, Sign};

/// One level of a [`Tower`](super::Tower): adjoins `√radicand`.
pub(crate) struct Level {
    pub(crate) tower: u64,
    pub(crate) index: usize,
    pub(crate) radicand: Constructible,
    /// Set once `√radicand` has been found to lie in the field below.
    pub(crate) root: OnceLock<Constructible>,
    pub(crate) radicand_approx: OnceLock<DyadicInterval>,
}

impl Level {
    fn same(&self, other: &Level) -> bool {
        assert_eq!(
            self.tower, other.tower,
            "constructible values from different towers were mixed"
        );
        self.index == other.index
    }
}

impl fmt::Debug for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Level#{}(√{})", self.index, self.radicand)
    }
}

enum Repr {
    Rat(Rational),
    Ext(Ext),
}

struct Ext {
    level: Arc<Level>,
    a: Constructible,
    b: Constructible,
    nodes: usize,
    sign: OnceLock<Sign>,
}

/// An exact constructible real number.
#[derive(Clone)]
pub struct Constructible(Arc<Repr>);

/// A borrowed view of a value's top-level structure.
pub enum View<'a> {
    Rational(&'a Rational),
    /// `a + b·√radicand` at tower level `level`.
    Extension {
        level: usize,
        a: &'a Constructible,
        b: &'a Constructible,
        radicand: &'a Constructible,
    },
}

impl Constructible {
    pub fn zero() -> Self {
        Self::rational(Rational::zero())
    }

    pub fn one() -> Self {
        Self::rational(Rational::one())
    }

    pub fn rational(q: Rational) -> Self {
        Constructible(Arc::new(Repr::Rat(q)))
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Self::rational(Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn view(&self) -> View<'_> {
        match &*self.0 {
            Repr::Rat(q) => View::Rational(q),
            Repr::Ext(e) => View::Extension {
                level: e.level.index,
                a: &e.a,
                b: &e.b,
                radicand: &e.level.radicand,
            },
        }
    }

    /// The rational value, if this value is stored as a rational leaf.
    pub fn as_rational(&self) -> Option<&Rational> {
        match &*self.0 {
            Repr::Rat(q) => Some(q),
            Repr::Ext(_) => None,
        }
    }

    /// Recognizes a rational value even when it is stored in an extension.
    ///
    /// Structural leaves are returned directly; otherwise the value is pinned
    /// by a narrow interval, the simplest rational inside is proposed and
    /// confirmed by an exact sign test. Failing to recognize is not a proof of
    /// irrationality.
    pub fn recognize_rational(&self) -> Option<Rational> {
        if let Some(q) = self.as_rational() {
            return Some(q.clone());
        }
        for bits in [64u32, 256] {
            let iv = self.approx(bits);
            let (lo, hi) = iv.bounds();
            let q = super::simplest_rational_in_closed(&lo, &hi);
            if (self - &Constructible::rational(q.clone())).sign() == Sign::Zero {
                return Some(q);
            }
        }
        None
    }

    pub fn is_structurally_zero(&self) -> bool {
        matches!(&*self.0, Repr::Rat(q) if q.is_zero())
    }

    fn is_structurally_one(&self) -> bool {
        matches!(&*self.0, Repr::Rat(q) if q.is_one())
    }

    /// Number of nodes in the representation (rational leaves and pairs).
    pub fn node_count(&self) -> usize {
        match &*self.0 {
            Repr::Rat(_) => 1,
            Repr::Ext(e) => e.nodes,
        }
    }

    /// Tower level of the outermost extension, `None` for rational leaves.
    pub fn level(&self) -> Option<usize> {
        match &*self.0 {
            Repr::Rat(_) => None,
            Repr::Ext(e) => Some(e.level.index),
        }
    }

    pub(crate) fn tower_id(&self) -> Option<u64> {
        match &*self.0 {
            Repr::Rat(_) => None,
            Repr::Ext(e) => Some(e.level.tower),
        }
    }

    pub(crate) fn unit_root(level: &Arc<Level>) -> Constructible {
        make_ext(level, Constructible::zero(), Constructible::one())
    }

    /// Exact sign, using a fixed-precision interval filter before the
    /// algebraic recursion.
    pub fn sign(&self) -> Sign {
        match &*self.0 {
            Repr::Rat(q) => rational_sign(q),
            Repr::Ext(e) => {
                if let Some(s) = e.sign.get() {
                    return *s;
                }
                let s = interval::filter_sign(self).unwrap_or_else(|| exact_ext_sign(e, true));
                *e.sign.get_or_init(|| s)
            }
        }
    }

    /// Exact sign by the purely algebraic recursion on
    /// `sign(a)`, `sign(b)` and `sign(a² − b²·r)`; no interval arithmetic.
    pub fn sign_exact(&self) -> Sign {
        match &*self.0 {
            Repr::Rat(q) => rational_sign(q),
            Repr::Ext(e) => exact_ext_sign(e, false),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign() == Sign::Zero
    }

    pub fn abs(&self) -> Constructible {
        if self.sign() == Sign::Negative {
            -self
        } else {
            self.clone()
        }
    }

    pub fn square(&self) -> Constructible {
        self * self
    }

    pub fn recip(&self) -> Result<Constructible, NumError> {
        if self.sign() == Sign::Zero {
            return Err(NumError::DivisionByZero);
        }
        Ok(recip_nonzero(self))
    }

    pub fn checked_div(&self, other: &Constructible) -> Result<Constructible, NumError> {
        if let (Some(p), Some(q)) = (self.as_rational(), other.as_rational()) {
            if q.is_zero() {
                return Err(NumError::DivisionByZero);
            }
            return Ok(Constructible::rational(p / q));
        }
        Ok(self * &other.recip()?)
    }

    /// Certified enclosure of width at most `2^-precision_bits`.
    pub fn approx(&self, precision_bits: u32) -> DyadicInterval {
        interval::approx(self, precision_bits)
    }

    pub fn to_f64(&self) -> f64 {
        match &*self.0 {
            Repr::Rat(q) => rational_to_f64(q),
            Repr::Ext(_) => self.approx(60).midpoint_f64(),
        }
    }

    /// Fixed-point decimal rendering with `digits` fractional digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        let bits = (digits as f64 * 3.33).ceil() as u32 + 8;
        self.approx(bits).midpoint_decimal(digits)
    }

    /// Floor as an integer.
    pub fn floor(&self) -> BigInt {
        if let Some(q) = self.as_rational() {
            return q.floor().to_integer();
        }
        let iv = self.approx(16);
        let (lo, _) = iv.bounds();
        let mut n = lo.floor().to_integer();
        // lo is within 2^-16 of the value: the floor is n or n + 1
        let next = Constructible::rational(Rational::from_integer(&n + 1));
        if (self - &next).sign() != Sign::Negative {
            n += 1;
        }
        let here = Constructible::rational(Rational::from_integer(n.clone()));
        if (self - &here).sign() == Sign::Negative {
            n -= 1;
        }
        n
    }

    pub(crate) fn ext_parts(&self) -> Option<(&Arc<Level>, &Constructible, &Constructible)> {
        match &*self.0 {
            Repr::Rat(_) => None,
            Repr::Ext(e) => Some((&e.level, &e.a, &e.b)),
        }
    }
}

pub(crate) fn rational_sign(q: &Rational) -> Sign {
    if q.is_zero() {
        Sign::Zero
    } else if q.is_positive() {
        Sign::Positive
    } else {
        Sign::Negative
    }
}

pub(crate) fn rational_to_f64(q: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or_else(|| {
        // huge numerator/denominator: scale through the interval code
        interval::rational_midpoint_f64(q)
    })
}

fn exact_ext_sign(e: &Ext, filtered: bool) -> Sign {
    let sub = |x: &Constructible| if filtered { x.sign() } else { x.sign_exact() };
    let sa = sub(&e.a);
    let sb = sub(&e.b);
    match (sa, sb) {
        (_, Sign::Zero) => sa,
        (Sign::Zero, _) => sb,
        (p, q) if p == q => p,
        _ => {
            let r = &e.level.radicand;
            let d = &e.a.square() - &(&e.b.square() * r);
            let sd = sub(&d);
            if sa == Sign::Positive {
                sd
            } else {
                -sd
            }
        }
    }
}

fn make_ext(level: &Arc<Level>, a: Constructible, b: Constructible) -> Constructible {
    if b.is_structurally_zero() {
        return a;
    }
    if let Some(root) = level.root.get() {
        return &a + &(&b * root);
    }
    let nodes = 1 + a.node_count() + b.node_count();
    Constructible(Arc::new(Repr::Ext(Ext {
        level: level.clone(),
        a,
        b,
        nodes,
        sign: OnceLock::new(),
    })))
}

fn level_order(x: &Constructible, y: &Constructible) -> Ordering {
    match (&*x.0, &*y.0) {
        (Repr::Rat(_), Repr::Rat(_)) => Ordering::Equal,
        (Repr::Rat(_), Repr::Ext(_)) => Ordering::Less,
        (Repr::Ext(_), Repr::Rat(_)) => Ordering::Greater,
        (Repr::Ext(a), Repr::Ext(b)) => {
            if a.level.same(&b.level) {
                Ordering::Equal
            } else {
                a.level.index.cmp(&b.level.index)
            }
        }
    }
}

fn add_values(x: &Constructible, y: &Constructible) -> Constructible {
    if x.is_structurally_zero() {
        return y.clone();
    }
    if y.is_structurally_zero() {
        return x.clone();
    }
    match (&*x.0, &*y.0) {
        (Repr::Rat(p), Repr::Rat(q)) => Constructible::rational(p + q),
        (Repr::Ext(ex), Repr::Ext(ey)) if level_order(x, y) == Ordering::Equal => {
            make_ext(&ex.level, &ex.a + &ey.a, &ex.b + &ey.b)
        }
        _ => {
            let (hi, lo) = if level_order(x, y) == Ordering::Greater {
                (x, y)
            } else {
                (y, x)
            };
            let (level, a, b) = hi.ext_parts().expect("higher operand is an extension");
            make_ext(level, a + lo, b.clone())
        }
    }
}

fn mul_values(x: &Constructible, y: &Constructible) -> Constructible {
    if x.is_structurally_zero() || y.is_structurally_zero() {
        return Constructible::zero();
    }
    if x.is_structurally_one() {
        return y.clone();
    }
    if y.is_structurally_one() {
        return x.clone();
    }
    match (&*x.0, &*y.0) {
        (Repr::Rat(p), Repr::Rat(q)) => Constructible::rational(p * q),
        (Repr::Ext(ex), Repr::Ext(ey)) if level_order(x, y) == Ordering::Equal => {
            let r = &ex.level.radicand;
            let a = &(&ex.a * &ey.a) + &(&(&ex.b * &ey.b) * r);
            let b = &(&ex.a * &ey.b) + &(&ex.b * &ey.a);
            make_ext(&ex.level, a, b)
        }
        _ => {
            let (hi, lo) = if level_order(x, y) == Ordering::Greater {
                (x, y)
            } else {
                (y, x)
            };
            let (level, a, b) = hi.ext_parts().expect("higher operand is an extension");
            make_ext(level, a * lo, b * lo)
        }
    }
}

fn neg_value(x: &Constructible) -> Constructible {
    match &*x.0 {
        Repr::Rat(q) => Constructible::rational(-q),
        Repr::Ext(e) => make_ext(&e.level, -&e.a, -&e.b),
    }
}

/// Inverse of a value already known to be nonzero.
fn recip_nonzero(x: &Constructible) -> Constructible {
    match &*x.0 {
        Repr::Rat(q) => Constructible::rational(q.recip()),
        Repr::Ext(e) => {
            let r = &e.level.radicand;
            let norm = &e.a.square() - &(&e.b.square() * r);
            if norm.sign() != Sign::Zero {
                let inv = recip_nonzero(&norm);
                make_ext(&e.level, &e.a * &inv, -(&e.b * &inv))
            } else {
                // a² = b²·r with b ≠ 0, so √r = |a/b| already lives below this level
                let root = (&e.a * &recip_nonzero(&e.b)).abs();
                let root = e.level.root.get_or_init(|| root).clone();
                let collapsed = &e.a + &(&e.b * &root);
                recip_nonzero(&collapsed)
            }
        }
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $f:expr) => {
        impl $tr<&Constructible> for &Constructible {
            type Output = Constructible;
            fn $method(self, rhs: &Constructible) -> Constructible {
                $f(self, rhs)
            }
        }
        impl $tr<Constructible> for Constructible {
            type Output = Constructible;
            fn $method(self, rhs: Constructible) -> Constructible {
                $f(&self, &rhs)
            }
        }
        impl $tr<&Constructible> for Constructible {
            type Output = Constructible;
            fn $method(self, rhs: &Constructible) -> Constructible {
                $f(&self, rhs)
            }
        }
        impl $tr<Constructible> for &Constructible {
            type Output = Constructible;
            fn $method(self, rhs: Constructible) -> Constructible {
                $f(self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_values);
forward_binop!(Sub, sub, |x: &Constructible, y: &Constructible| add_values(
    x,
    &neg_value(y)
));
forward_binop!(Mul, mul, mul_values);

impl Neg for &Constructible {
    type Output = Constructible;
    fn neg(self) -> Constructible {
        neg_value(self)
    }
}

impl Neg for Constructible {
    type Output = Constructible;
    fn neg(self) -> Constructible {
        neg_value(&self)
    }
}

impl PartialEq for Constructible {
    fn eq(&self, other: &Self) -> bool {
        (self - other).sign() == Sign::Zero
    }
}

impl Eq for Constructible {}

impl PartialOrd for Constructible {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Constructible {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self - other).sign() {
            Sign::Negative => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Positive => Ordering::Greater,
        }
    }
}

impl From<Rational> for Constructible {
    fn from(q: Rational) -> Self {
        Constructible::rational(q)
    }
}

impl From<i64> for Constructible {
    fn from(n: i64) -> Self {
        Constructible::integer(n)
    }
}

impl fmt::Display for Constructible {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr())
    }
}

impl fmt::Debug for Constructible {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}
