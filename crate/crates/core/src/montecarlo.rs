//! Deterministic empirical probe of the limsup set: counter-based sampling
//! of exact dyadic points and exact-membership hit statistics over tail
//! windows of q.
//!
//! No finite run verifies the limsup statement itself; a non-degenerating
//! hit profile across dyadic windows is evidence, reported as such.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::psi::PsiFunction;
use crate::rational::{rat_u64, Rational};
use crate::sets::{member, SetDescriptor, SetsError, Variant};
use crate::target::{Target, TargetError};

#[derive(Debug, Error)]
pub enum MonteCarloError {
    #[error("sample count must be at least 1")]
    EmptySample,
    #[error("window bounds must satisfy 1 <= Q0 <= Q1")]
    BadWindow,
    #[error(transparent)]
    Sets(#[from] SetsError),
    #[error(transparent)]
    Target(#[from] TargetError),
}

/// A reproducible batch of uniform points on [0,1)^2 with exact dyadic
/// coordinates of denominator 2^64.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleRun {
    pub seed: u64,
    pub n: u64,
    pub points: Vec<(Rational, Rational)>,
}

/// SplitMix64 finalizer on (seed, counter): stateless, so point i never
/// depends on evaluation order.
fn counter_rand(seed: u64, counter: u64) -> u64 {
    let mut z = seed
        .wrapping_add(counter.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn dyadic(u: u64) -> Rational {
    Rational::new(BigInt::from(u), BigInt::one() << 64)
}

/// N uniform points with coordinates k/2^64.
pub fn sample(n: u64, seed: u64) -> Result<SampleRun, MonteCarloError> {
    if n == 0 {
        return Err(MonteCarloError::EmptySample);
    }
    let points = (0..n)
        .map(|i| {
            (
                dyadic(counter_rand(seed, 2 * i)),
                dyadic(counter_rand(seed, 2 * i + 1)),
            )
        })
        .collect();
    Ok(SampleRun { seed, n, points })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailHitReport {
    /// Fraction of points hit by some q in [Q0, Q1].
    pub fraction: Rational,
    /// Smallest hitting q per point, if any.
    pub first_hit: Vec<Option<u64>>,
}

/// Fraction of sample points x with member(x, set at q) for some q in
/// [Q0, Q1]. Scans q upward and drops points at their first hit.
pub fn tail_hit_fraction(
    run: &SampleRun,
    q0: u64,
    q1: u64,
    psi: &PsiFunction,
    target: &Target,
    variant: Variant,
) -> Result<TailHitReport, MonteCarloError> {
    if q0 == 0 || q0 > q1 {
        return Err(MonteCarloError::BadWindow);
    }
    let mut first_hit: Vec<Option<u64>> = vec![None; run.points.len()];
    let mut remaining: Vec<usize> = (0..run.points.len()).collect();
    let y = target.y().clone();
    for q in q0..=q1 {
        if remaining.is_empty() {
            break;
        }
        let psi_q = psi.eval(q);
        if psi_q.is_zero() {
            continue;
        }
        let d = match variant {
            Variant::Full => SetDescriptor::full(q, psi_q, y.clone())?,
            Variant::Tilde => {
                SetDescriptor::tilde(q, psi_q, y.clone(), target.approximant(q)?)?
            }
        };
        remaining.retain(|&i| {
            if member(&run.points[i], &d) {
                first_hit[i] = Some(q);
                false
            } else {
                true
            }
        });
    }
    let hits = run.points.len() - remaining.len();
    Ok(TailHitReport {
        fraction: rat_u64(hits as u64) / rat_u64(run.n),
        first_hit,
    })
}

/// Entry k is the hit fraction over the dyadic window [2^k, 2^{k+1}), for
/// k = 0..=kmax.
pub fn dyadic_hit_profile(
    run: &SampleRun,
    kmax: u32,
    psi: &PsiFunction,
    target: &Target,
    variant: Variant,
) -> Result<Vec<Rational>, MonteCarloError> {
    let mut out = Vec::with_capacity(kmax as usize + 1);
    for k in 0..=kmax {
        let q0 = 1u64 << k;
        let q1 = (1u64 << (k + 1)) - 1;
        out.push(tail_hit_fraction(run, q0, q1, psi, target, variant)?.fraction);
    }
    Ok(out)
}
