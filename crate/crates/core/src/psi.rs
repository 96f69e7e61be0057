//! Catalog of approximation functions q -> psi(q), all evaluated in exact
//! rationals on a configurable grid, plus the normalization min{c psi, 1/2}
//! and support restriction.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::numtheory::{cmp_power, floor_root_of_ratio};
use crate::rational::{one_half, parse_rational, rat_u64, Rational};

/// Default rounding-grid denominator: fine enough that desk-scale decay
/// behavior is unchanged.
pub const DEFAULT_GRID: u64 = 1 << 32;

#[derive(Debug, Error)]
pub enum PsiError {
    #[error("scale c must be positive")]
    NonPositiveScale,
    #[error("decay exponent delta must be positive")]
    NonPositiveDelta,
    #[error("grid denominator must be at least 2")]
    GridTooCoarse,
    #[error("normalization constant must satisfy 0 < c <= 1")]
    BadNormalizationConstant,
    #[error("malformed psi table line {line}: {reason}")]
    BadTableLine { line: usize, reason: String },
}

#[derive(Clone)]
pub enum PsiFunction {
    /// Grid-rounded power decay: psi(q) = floor(c q^-delta D) / D.
    PowerDecay {
        c: Rational,
        delta: Rational,
        grid: u64,
    },
    /// Constant function, mainly for tests and degenerate cases.
    Constant(Rational),
    /// Explicit table; unlisted q evaluate to 0.
    Table(BTreeMap<u64, Rational>),
    /// Inner function gated by a support predicate.
    Restricted {
        inner: Box<PsiFunction>,
        support: Arc<dyn Fn(u64) -> bool + Send + Sync>,
    },
    /// min{c inner(q), 1/2}.
    Normalized { inner: Box<PsiFunction>, c: Rational },
}

impl std::fmt::Debug for PsiFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PsiFunction::PowerDecay { c, delta, grid } => f
                .debug_struct("PowerDecay")
                .field("c", c)
                .field("delta", delta)
                .field("grid", grid)
                .finish(),
            PsiFunction::Constant(v) => f.debug_tuple("Constant").field(v).finish(),
            PsiFunction::Table(t) => f.debug_tuple("Table").field(&t.len()).finish(),
            PsiFunction::Restricted { inner, .. } => {
                f.debug_struct("Restricted").field("inner", inner).finish()
            }
            PsiFunction::Normalized { inner, c } => f
                .debug_struct("Normalized")
                .field("inner", inner)
                .field("c", c)
                .finish(),
        }
    }
}

/// psi(q) = floor(c q^-delta D) / D, computed exactly for rational delta by
/// integer-root bracketing. Rounding is always downward, so psi(q) <= c q^-delta.
pub fn power_psi(c: Rational, delta: Rational, grid: u64) -> Result<PsiFunction, PsiError> {
    if !c.is_positive() {
        return Err(PsiError::NonPositiveScale);
    }
    if !delta.is_positive() {
        return Err(PsiError::NonPositiveDelta);
    }
    if grid < 2 {
        return Err(PsiError::GridTooCoarse);
    }
    Ok(PsiFunction::PowerDecay { c, delta, grid })
}

pub fn constant_psi(v: Rational) -> PsiFunction {
    PsiFunction::Constant(v)
}

/// Gate f by the predicate S: evaluates f(q) when S(q) holds, else 0.
pub fn restrict_support<S>(f: PsiFunction, support: S) -> PsiFunction
where
    S: Fn(u64) -> bool + Send + Sync + 'static,
{
    PsiFunction::Restricted {
        inner: Box::new(f),
        support: Arc::new(support),
    }
}

/// Pointwise min{c f(q), 1/2}.
pub fn normalize(f: PsiFunction, c: Rational) -> Result<PsiFunction, PsiError> {
    if !c.is_positive() || c > Rational::from_integer(1.into()) {
        return Err(PsiError::BadNormalizationConstant);
    }
    Ok(PsiFunction::Normalized {
        inner: Box::new(f),
        c,
    })
}

/// Load an explicit table from two-column CSV text: `q,num/den` per line.
/// Lines starting with '#' and a leading `q,psi` header are skipped.
pub fn table_from_csv(text: &str) -> Result<PsiFunction, PsiError> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if idx == 0 && line.to_ascii_lowercase().starts_with("q,") {
            continue;
        }
        let (q_s, v_s) = line.split_once(',').ok_or(PsiError::BadTableLine {
            line: idx + 1,
            reason: "expected two comma-separated columns".into(),
        })?;
        let q: u64 = q_s.trim().parse().map_err(|_| PsiError::BadTableLine {
            line: idx + 1,
            reason: format!("bad index {q_s:?}"),
        })?;
        let v = parse_rational(v_s).map_err(|e| PsiError::BadTableLine {
            line: idx + 1,
            reason: e.to_string(),
        })?;
        map.insert(q, v);
    }
    Ok(PsiFunction::Table(map))
}

impl PsiFunction {
    /// Exact value at q.
    pub fn eval(&self, q: u64) -> Rational {
        assert!(q >= 1, "psi is defined on positive integers");
        match self {
            PsiFunction::PowerDecay { c, delta, grid } => {
                // k = floor(c q^{-p/s} D): largest k with
                // k^s c_den^s q^p <= (c_num D)^s.
                let p = u32::try_from(delta.numer()).expect("delta numerator fits u32");
                let s = u32::try_from(delta.denom()).expect("delta denominator fits u32");
                let num = (c.numer() * BigInt::from(*grid)).pow(s);
                let den = c.denom().pow(s) * BigInt::from(q).pow(p);
                let k = floor_root_of_ratio(&num, &den, s);
                Rational::new(k, BigInt::from(*grid))
            }
            PsiFunction::Constant(v) => v.clone(),
            PsiFunction::Table(map) => map.get(&q).cloned().unwrap_or_else(Rational::zero),
            PsiFunction::Restricted { inner, support } => {
                if support(q) {
                    inner.eval(q)
                } else {
                    Rational::zero()
                }
            }
            PsiFunction::Normalized { inner, c } => {
                let v = c * inner.eval(q);
                v.min(one_half())
            }
        }
    }

    /// Exact partial sum of psi(q)^2 for q = 1..=qmax, the divergence
    /// quantity of the (1,2) case.
    pub fn sum_of_squares(&self, qmax: u64) -> Rational {
        let mut acc = Rational::zero();
        for q in 1..=qmax {
            let v = self.eval(q);
            acc += &v * &v;
        }
        acc
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecayReport {
    pub holds: bool,
    pub first_violation: Option<u64>,
}

/// Exact check that f(q) <= q^-delta for all q <= qmax, via cross-powering
/// with delta = p/s; reports the smallest violating q on failure.
pub fn check_decay(f: &PsiFunction, delta: &Rational, qmax: u64) -> DecayReport {
    let p = u32::try_from(delta.numer()).expect("delta numerator fits u32");
    let s = u32::try_from(delta.denom()).expect("delta denominator fits u32");
    for q in 1..=qmax {
        let v = f.eval(q);
        // v <= q^{-p/s}  <=>  v^s <= (1/q)^p
        if cmp_power(&v, s, &rat_u64(q).recip(), p) == std::cmp::Ordering::Greater {
            return DecayReport {
                holds: false,
                first_violation: Some(q),
            };
        }
    }
    DecayReport {
        holds: true,
        first_violation: None,
    }
}
