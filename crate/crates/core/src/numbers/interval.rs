//! Outward-rounded dyadic interval evaluation of constructible values.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::real::{Constructible, View};
use super::{Rational, Sign};

/// The closed interval `[lo·2^-exp, hi·2^-exp]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DyadicInterval {
    pub lo: BigInt,
    pub hi: BigInt,
    pub exp: u32,
}

impl DyadicInterval {
    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// The sign certified by this enclosure, if it excludes zero.
    pub fn sign(&self) -> Option<Sign> {
        if self.lo.is_positive() {
            Some(Sign::Positive)
        } else if self.hi.is_negative() {
            Some(Sign::Negative)
        } else {
            None
        }
    }

    pub fn bounds(&self) -> (Rational, Rational) {
        let den = BigInt::from(1) << self.exp;
        (
            Rational::new(self.lo.clone(), den.clone()),
            Rational::new(self.hi.clone(), den),
        )
    }

    /// Width as a rational.
    pub fn width(&self) -> Rational {
        Rational::new(&self.hi - &self.lo, BigInt::from(1) << self.exp)
    }

    pub fn contains(&self, q: &Rational) -> bool {
        let (lo, hi) = self.bounds();
        &lo <= q && q <= &hi
    }

    pub fn midpoint_f64(&self) -> f64 {
        let sum = &self.lo + &self.hi;
        scaled_to_f64(&sum, self.exp + 1)
    }

    pub fn midpoint_decimal(&self, digits: usize) -> String {
        let sum: BigInt = &self.lo + &self.hi;
        let scale = BigInt::from(10u32).pow(digits as u32);
        let den = BigInt::from(1) << (self.exp + 1);
        let scaled = (sum * &scale).div_floor(&den);
        let neg = scaled.is_negative();
        let mag = scaled.abs();
        let (int, frac) = mag.div_rem(&scale);
        let sign = if neg { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{:0>width$}", frac.to_string(), width = digits)
        }
    }
}

fn scaled_to_f64(n: &BigInt, exp: u32) -> f64 {
    use num_traits::ToPrimitive;
    let bits = n.bits() as i64;
    // keep 60 significant bits before converting
    let shift = (bits - 60).max(0);
    let m = (n >> shift as usize).to_f64().unwrap_or(0.0);
    m * 2f64.powi((shift - exp as i64) as i32)
}

pub(crate) fn rational_midpoint_f64(q: &Rational) -> f64 {
    let iv = rational_interval(q, 64);
    DyadicInterval {
        lo: iv.0,
        hi: iv.1,
        exp: 64,
    }
    .midpoint_f64()
}

fn rational_interval(q: &Rational, w: u32) -> (BigInt, BigInt) {
    let num = q.numer() << w;
    let (lo, rem) = num.div_mod_floor(q.denom());
    let hi = if rem.is_zero() { lo.clone() } else { &lo + 1 };
    (lo, hi)
}

fn mul_fixed(a: &(BigInt, BigInt), b: &(BigInt, BigInt), w: u32) -> (BigInt, BigInt) {
    let prods = [&a.0 * &b.0, &a.0 * &b.1, &a.1 * &b.0, &a.1 * &b.1];
    let min = prods.iter().min().unwrap();
    let max = prods.iter().max().unwrap();
    let den = BigInt::from(1) << w;
    let lo = min.div_floor(&den);
    let (q, r) = max.div_mod_floor(&den);
    let hi = if r.is_zero() { q } else { q + 1 };
    (lo, hi)
}

fn sqrt_fixed(a: &(BigInt, BigInt), w: u32) -> (BigInt, BigInt) {
    let lo = if a.0.is_positive() {
        (&a.0 << w).sqrt()
    } else {
        BigInt::zero()
    };
    let hi = if a.1.is_positive() {
        let n = &a.1 << w;
        let s = n.sqrt();
        if &s * &s < n {
            s + 1
        } else {
            s
        }
    } else {
        BigInt::zero()
    };
    (lo, hi)
}

struct Evaluator {
    w: u32,
    roots: HashMap<usize, (BigInt, BigInt)>,
}

impl Evaluator {
    fn eval(&mut self, x: &Constructible) -> (BigInt, BigInt) {
        match x.view() {
            View::Rational(q) => rational_interval(q, self.w),
            View::Extension {
                level,
                a,
                b,
                radicand,
            } => {
                let ia = self.eval(a);
                let ib = self.eval(b);
                let root = match self.roots.get(&level) {
                    Some(r) => r.clone(),
                    None => {
                        let ir = self.eval(radicand);
                        let r = sqrt_fixed(&ir, self.w);
                        self.roots.insert(level, r.clone());
                        r
                    }
                };
                let prod = mul_fixed(&ib, &root, self.w);
                (ia.0 + prod.0, ia.1 + prod.1)
            }
        }
    }
}

fn eval_at(x: &Constructible, w: u32) -> DyadicInterval {
    let mut ev = Evaluator {
        w,
        roots: HashMap::new(),
    };
    let (lo, hi) = ev.eval(x);
    DyadicInterval { lo, hi, exp: w }
}

/// Adaptive evaluation: working precision doubles until the width target is met.
pub(crate) fn approx(x: &Constructible, precision_bits: u32) -> DyadicInterval {
    let bits = precision_bits.max(1);
    let mut w = bits + 16;
    loop {
        let iv = eval_at(x, w);
        let limit = BigInt::from(1) << (w - bits);
        if &iv.hi - &iv.lo <= limit {
            return iv;
        }
        w = w.saturating_mul(2);
    }
}

/// One fixed-precision pass; `None` when the enclosure straddles zero.
pub(crate) fn filter_sign(x: &Constructible) -> Option<Sign> {
    eval_at(x, 64).sign()
}
