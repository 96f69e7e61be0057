//! Canonical approximant sequence (a_q, b_q) for an inhomogeneous shift
//! y in [0,1)^2: for each q, the smallest denominator b <= q^(2 delta/(delta+3))
//! with |b y - a| < q^(-delta/(delta+3)) in sup norm and gcd(a1, a2, b) = 1.
//!
//! Ties at the minimal b are broken by smallest sup-norm error, then by
//! lexicographically smallest a, so the sequence is reproducible.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::RwLock;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use thiserror::Error;

use crate::numtheory::{cmp_power, floor_pow};
use crate::rational::{fmt_rational, rat_u64, Rational};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TargetError {
    #[error("shift coordinates must lie in [0,1)")]
    ShiftOutOfRange,
    #[error("delta must be a positive rational with numerator and denominator fitting u32")]
    BadDelta,
    #[error("no admissible b <= {bmax} for q = {q}")]
    NoAdmissibleB { q: u64, bmax: u64 },
}

/// One Dirichlet-type approximant: |b y - a| < q^(-delta/(delta+3)),
/// 1 <= b <= q^(2 delta/(delta+3)), gcd(a1, a2, b) = 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproximantPair {
    pub q: u64,
    pub b: u64,
    pub a: (BigInt, BigInt),
    /// Exact sup-norm error |b y - a|.
    pub sup_error: Rational,
}

impl ApproximantPair {
    /// CLI row: "q,b,a1,a2,err_num/err_den".
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.q,
            self.b,
            self.a.0,
            self.a.1,
            fmt_rational(&self.sup_error)
        )
    }
}

/// Per-constraint result of re-checking an approximant against its target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproximantValidation {
    pub error_within_bound: bool,
    pub b_within_bound: bool,
    pub coprime: bool,
    pub sup_error: Rational,
}

impl ApproximantValidation {
    pub fn ok(&self) -> bool {
        self.error_within_bound && self.b_within_bound && self.coprime
    }
}

/// The inhomogeneous shift together with its decay parameter and the cache
/// of canonical approximants.
pub struct Target {
    y: (Rational, Rational),
    delta: Rational,
    /// delta = p/s as machine integers.
    exp_p: u32,
    exp_s: u32,
    cache: RwLock<BTreeMap<u64, ApproximantPair>>,
}

impl Target {
    pub fn new(y: (Rational, Rational), delta: Rational) -> Result<Self, TargetError> {
        let one = Rational::one();
        for c in [&y.0, &y.1] {
            if c.is_negative() || *c >= one {
                return Err(TargetError::ShiftOutOfRange);
            }
        }
        if !delta.is_positive() {
            return Err(TargetError::BadDelta);
        }
        let exp_p = u32::try_from(delta.numer()).map_err(|_| TargetError::BadDelta)?;
        let exp_s = u32::try_from(delta.denom()).map_err(|_| TargetError::BadDelta)?;
        Ok(Target {
            y,
            delta,
            exp_p,
            exp_s,
            cache: RwLock::new(BTreeMap::new()),
        })
    }

    pub fn y(&self) -> &(Rational, Rational) {
        &self.y
    }

    pub fn delta(&self) -> &Rational {
        &self.delta
    }

    /// Strict exact test |e| < q^(-delta/(delta+3)):
    /// e^(p+3s) < q^(-p) with delta = p/s.
    fn error_ok(&self, err: &Rational, q: u64) -> bool {
        let exp = self.exp_p + 3 * self.exp_s;
        cmp_power(err, exp, &rat_u64(q).recip(), self.exp_p) == Ordering::Less
    }

    /// floor(q^(2 delta/(delta+3))) = floor(q^(2p/(p+3s))).
    pub fn b_bound(&self, q: u64) -> u64 {
        floor_pow(q, 2 * self.exp_p, self.exp_p + 3 * self.exp_s)
    }

    /// Canonical approximant for q: exhaustive scan over b, minimal b first,
    /// then minimal sup error, then lexicographically smallest a. Cached.
    pub fn approximant(&self, q: u64) -> Result<ApproximantPair, TargetError> {
        assert!(q >= 1);
        if let Some(hit) = self.cache.read().unwrap().get(&q) {
            return Ok(hit.clone());
        }
        let bmax = self.b_bound(q);
        for b in 1..=bmax {
            if let Some(pair) = self.best_at_b(q, b) {
                // Idempotent write: the computation is deterministic, so
                // concurrent insertions always agree.
                self.cache.write().unwrap().insert(q, pair.clone());
                return Ok(pair);
            }
        }
        Err(TargetError::NoAdmissibleB { q, bmax })
    }

    fn best_at_b(&self, q: u64, b: u64) -> Option<ApproximantPair> {
        let by0 = &self.y.0 * rat_u64(b);
        let by1 = &self.y.1 * rat_u64(b);
        let cands0 = integer_candidates(&by0);
        let cands1 = integer_candidates(&by1);
        let mut best: Option<ApproximantPair> = None;
        for a0 in &cands0 {
            let e0 = (&by0 - Rational::from_integer(a0.clone())).abs();
            if !self.error_ok(&e0, q) {
                continue;
            }
            for a1 in &cands1 {
                let e1 = (&by1 - Rational::from_integer(a1.clone())).abs();
                let sup = e0.clone().max(e1);
                if !self.error_ok(&sup, q) {
                    continue;
                }
                if gcd3(a0, a1, b) != BigInt::one() {
                    continue;
                }
                let candidate = ApproximantPair {
                    q,
                    b,
                    a: (a0.clone(), a1.clone()),
                    sup_error: sup,
                };
                best = Some(match best.take() {
                    None => candidate,
                    Some(cur) => pick_better(cur, candidate),
                });
            }
        }
        best
    }

    /// Re-check every constraint of a pair against this target, independent
    /// of the search path that produced it.
    pub fn validate_approximant(&self, pair: &ApproximantPair) -> ApproximantValidation {
        let e0 = (&self.y.0 * rat_u64(pair.b) - Rational::from_integer(pair.a.0.clone())).abs();
        let e1 = (&self.y.1 * rat_u64(pair.b) - Rational::from_integer(pair.a.1.clone())).abs();
        let sup = e0.max(e1);
        ApproximantValidation {
            error_within_bound: self.error_ok(&sup, pair.q),
            b_within_bound: pair.b >= 1 && pair.b <= self.b_bound(pair.q),
            coprime: gcd3(&pair.a.0, &pair.a.1, pair.b) == BigInt::one(),
            sup_error: sup,
        }
    }
}

/// Smaller sup error wins; ties broken by lexicographically smaller a.
fn pick_better(x: ApproximantPair, y: ApproximantPair) -> ApproximantPair {
    match x.sup_error.cmp(&y.sup_error) {
        Ordering::Less => x,
        Ordering::Greater => y,
        Ordering::Equal => {
            if (&y.a.0, &y.a.1) < (&x.a.0, &x.a.1) {
                y
            } else {
                x
            }
        }
    }
}

/// Integers a with |v - a| < 1, ascending; superset of every candidate at
/// any error threshold <= 1.
fn integer_candidates(v: &Rational) -> Vec<BigInt> {
    let fl = v.floor().to_integer();
    let mut out = Vec::with_capacity(3);
    for d in -1i32..=1 {
        let a = &fl + BigInt::from(d);
        if (v - Rational::from_integer(a.clone())).abs() < Rational::one() {
            out.push(a);
        }
    }
    out
}

fn gcd3(a0: &BigInt, a1: &BigInt, b: u64) -> BigInt {
    use num_integer::Integer;
    a0.gcd(a1).gcd(&BigInt::from(b))
}
