use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::real::{Constructible, Level, View};
use super::{NumError, Rational, Sign};

static NEXT_TOWER: AtomicU64 = AtomicU64::new(1);

/// Size limits enforced by a [`Tower`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TowerLimits {
    pub max_levels: usize,
    pub max_nodes: usize,
}

impl Default for TowerLimits {
    fn default() -> Self {
        TowerLimits {
            max_levels: 4096,
            max_nodes: 1 << 16,
        }
    }
}

/// Append-only tower of real quadratic extensions shared by one session.
///
/// Arithmetic on existing values never touches the tower; only [`Tower::sqrt`]
/// may append a level, and appends are serialized by an internal lock.
pub struct Tower {
    id: u64,
    levels: Mutex<Vec<Arc<Level>>>,
    // squarefree integer radicand -> level index
    integer_radicands: Mutex<HashMap<BigInt, usize>>,
    limits: TowerLimits,
}

impl std::fmt::Debug for Tower {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Tower")
            .field("id", &self.id)
            .field("levels", &self.len())
            .finish()
    }
}

impl Default for Tower {
    fn default() -> Self {
        Tower::new()
    }
}

impl Tower {
    pub fn new() -> Self {
        Tower::with_limits(TowerLimits::default())
    }

    pub fn with_limits(limits: TowerLimits) -> Self {
        Tower {
            id: NEXT_TOWER.fetch_add(1, Ordering::Relaxed),
            levels: Mutex::new(Vec::new()),
            integer_radicands: Mutex::new(HashMap::new()),
            limits,
        }
    }

    pub fn limits(&self) -> TowerLimits {
        self.limits
    }

    pub fn len(&self) -> usize {
        self.levels.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Radicands in creation order.
    pub fn radicands(&self) -> Vec<Constructible> {
        self.levels
            .lock()
            .unwrap()
            .iter()
            .map(|l| l.radicand.clone())
            .collect()
    }

    /// Fails with `BudgetExceeded` when `x` is larger than the node limit.
    pub fn check_size(&self, x: &Constructible) -> Result<(), NumError> {
        if x.node_count() > self.limits.max_nodes {
            return Err(NumError::BudgetExceeded {
                what: "expression nodes",
                limit: self.limits.max_nodes,
            });
        }
        Ok(())
    }

    fn check_owned(&self, x: &Constructible) {
        if let Some(id) = x.tower_id() {
            assert_eq!(id, self.id, "value belongs to a different tower");
        }
    }

    /// Exact non-negative square root.
    ///
    /// Reuses an existing level when the radicand (or, for rationals, its
    /// squarefree part) already has one, tries to denest inside the current
    /// field, and only then appends a new level.
    pub fn sqrt(&self, x: &Constructible) -> Result<Constructible, NumError> {
        self.check_owned(x);
        match x.sign() {
            Sign::Negative => return Err(NumError::NegativeRadicand),
            Sign::Zero => return Ok(Constructible::zero()),
            Sign::Positive => {}
        }
        self.check_size(x)?;
        if let Some(q) = x.as_rational() {
            return self.sqrt_rational(q);
        }
        if let Some(level) = self.find_level(x) {
            return Ok(Constructible::unit_root(&level));
        }
        if let Some(root) = self.try_sqrt_in_field(x, 3) {
            return Ok(root);
        }
        let level = self.append(x.clone())?;
        Ok(Constructible::unit_root(&level))
    }

    /// Appends a level for `radicand` unconditionally. Used to rebuild a saved
    /// tower level by level so that stored values keep their exact shape.
    pub fn push_level(&self, radicand: &Constructible) -> Result<Constructible, NumError> {
        self.check_owned(radicand);
        if radicand.sign() != Sign::Positive {
            return Err(NumError::NegativeRadicand);
        }
        let level = self.append(radicand.clone())?;
        if let Some(q) = radicand.as_rational() {
            if q.is_integer() {
                let (_, free) = split_square(q.numer());
                if &free == q.numer() {
                    self.integer_radicands
                        .lock()
                        .unwrap()
                        .entry(free)
                        .or_insert(level.index);
                }
            }
        }
        Ok(Constructible::unit_root(&level))
    }

    /// Square root if it can be found without extending the tower.
    pub fn try_sqrt(&self, x: &Constructible) -> Option<Constructible> {
        self.check_owned(x);
        self.try_sqrt_in_field(x, 3)
    }

    fn sqrt_rational(&self, q: &Rational) -> Result<Constructible, NumError> {
        let (square, free) = split_square(&(q.numer() * q.denom()));
        let coeff = Rational::new(square, q.denom().clone());
        if free.is_one() {
            return Ok(Constructible::rational(coeff));
        }
        let existing = self.integer_radicands.lock().unwrap().get(&free).copied();
        let level = match existing {
            Some(i) => self.levels.lock().unwrap()[i].clone(),
            None => {
                let level = self.append(Constructible::rational(Rational::from_integer(
                    free.clone(),
                )))?;
                self.integer_radicands
                    .lock()
                    .unwrap()
                    .insert(free, level.index);
                level
            }
        };
        Ok(&Constructible::rational(coeff) * &Constructible::unit_root(&level))
    }

    fn find_level(&self, x: &Constructible) -> Option<Arc<Level>> {
        let levels: Vec<Arc<Level>> = self.levels.lock().unwrap().clone();
        let mut probe: Option<super::DyadicInterval> = None;
        for level in levels {
            if level.radicand.as_rational().is_some() {
                continue;
            }
            let ra = level
                .radicand_approx
                .get_or_init(|| level.radicand.approx(48));
            let xa = probe.get_or_insert_with(|| x.approx(48));
            if ra.hi < xa.lo || xa.hi < ra.lo {
                continue;
            }
            if (&level.radicand - x).sign() == Sign::Zero {
                return Some(level);
            }
        }
        None
    }

    fn try_sqrt_in_field(&self, x: &Constructible, depth: u32) -> Option<Constructible> {
        match x.sign() {
            Sign::Negative => return None,
            Sign::Zero => return Some(Constructible::zero()),
            Sign::Positive => {}
        }
        match x.view() {
            View::Rational(q) => {
                let (square, free) = split_square(&(q.numer() * q.denom()));
                let coeff = Constructible::rational(Rational::new(square, q.denom().clone()));
                if free.is_one() {
                    return Some(coeff);
                }
                let idx = self.integer_radicands.lock().unwrap().get(&free).copied()?;
                let level = self.levels.lock().unwrap()[idx].clone();
                Some(&coeff * &Constructible::unit_root(&level))
            }
            View::Extension { a, b, radicand, .. } => {
                if let Some(level) = self.find_level(x) {
                    return Some(Constructible::unit_root(&level));
                }
                if depth == 0 || x.node_count() > 64 {
                    return None;
                }
                let (level, _, _) = x.ext_parts()?;
                let level = level.clone();
                let norm = &a.square() - &(&b.square() * radicand);
                let s = self.try_sqrt_in_field(&norm, depth - 1)?;
                let half = Constructible::ratio(1, 2);
                for cand in [&(a + &s) * &half, &(a - &s) * &half] {
                    if cand.sign() != Sign::Positive {
                        continue;
                    }
                    if let Some(p) = self.try_sqrt_in_field(&cand, depth - 1) {
                        let two_p = &p * &Constructible::integer(2);
                        let q = b.checked_div(&two_p).ok()?;
                        let root = &p + &(&q * &Constructible::unit_root(&level));
                        return Some(root.abs());
                    }
                }
                None
            }
        }
    }

    fn append(&self, radicand: Constructible) -> Result<Arc<Level>, NumError> {
        let mut levels = self.levels.lock().unwrap();
        if levels.len() >= self.limits.max_levels {
            return Err(NumError::BudgetExceeded {
                what: "tower levels",
                limit: self.limits.max_levels,
            });
        }
        let level = Arc::new(Level {
            tower: self.id,
            index: levels.len(),
            radicand,
            root: OnceLock::new(),
            radicand_approx: OnceLock::new(),
        });
        levels.push(level.clone());
        Ok(level)
    }
}

/// Splits `n > 0` as `s²·k`; `k` is squarefree when trial division up to the
/// bound factors `n` completely (best effort otherwise).
fn split_square(n: &BigInt) -> (BigInt, BigInt) {
    let mut rest = n.abs();
    let mut square = BigInt::one();
    let mut free = BigInt::one();
    let mut p = 2u64;
    while p <= 100_000 {
        if let Some(r) = rest.to_u64() {
            if p * p > r {
                break;
            }
        }
        let mut e = 0u32;
        while (&rest % p).is_zero() {
            rest /= p;
            e += 1;
        }
        if e > 0 {
            square *= BigInt::from(p).pow(e / 2);
            if e % 2 == 1 {
                free *= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let r = rest.sqrt();
    if &r * &r == rest {
        square *= r;
    } else {
        free *= rest;
    }
    (square, free)
}
