//! Exact arithmetic over constructible reals.

mod expr;
mod interval;
mod real;
mod tower;

pub use expr::{format_rational, BinOp, NumExpr};
pub use interval::DyadicInterval;
pub use real::{Constructible, View};
pub use tower::{Tower, TowerLimits};

use num_traits::{One, Signed, Zero};

pub type Rational = num_rational::BigRational;

/// Sign of an exact value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn of_rational(q: &Rational) -> Sign {
        real::rational_sign(q)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum NumError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("square root of a negative value")]
    NegativeRadicand,
    #[error("budget exceeded: {what} (limit {limit})")]
    BudgetExceeded { what: &'static str, limit: usize },
    #[error("malformed number: {0}")]
    Parse(String),
}

/// Rational with the smallest denominator (then smallest magnitude) in the
/// closed interval `[lo, hi]`.
pub fn simplest_rational_in_closed(lo: &Rational, hi: &Rational) -> Rational {
    debug_assert!(lo <= hi);
    if !lo.is_positive() && !hi.is_negative() {
        return Rational::zero();
    }
    if hi.is_negative() {
        return -simplest_rational_in_closed(&-hi, &-lo);
    }
    let fl = lo.floor();
    if &fl == lo {
        return fl;
    }
    let next = &fl + Rational::one();
    if &next <= hi {
        return next;
    }
    let inner = simplest_rational_in_closed(&(hi - &fl).recip(), &(lo - &fl).recip());
    fl + inner.recip()
}
