//! Exact integer and multiplicative-function arithmetic: factorization with
//! certified primality, totient/divisor functions, the Euler density of
//! admissible residue pairs, and floating-point-free power comparisons.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{rat_u64, Rational};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NumTheoryError {
    #[error("n must be positive")]
    ZeroInput,
    #[error("precondition gcd(a1, a2, b) = 1 violated")]
    NotCoprime,
}

/// A positive integer together with its certified prime factorization,
/// primes strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorProfile {
    pub value: u64,
    pub factors: Vec<(u64, u32)>,
}

impl FactorProfile {
    /// Primes dividing the value, in increasing order.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc: u64 = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin, valid for all n < 2^64 with this base set.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent-cycle Pollard rho; caller guarantees n is composite and odd.
fn pollard_rho(n: u64) -> u64 {
    let mut c: u64 = 1;
    loop {
        let mut x: u64 = 2;
        let mut y: u64 = 2;
        let mut d: u64 = 1;
        let step = |v: u64| (mul_mod(v, v, n) + c) % n;
        while d == 1 {
            x = step(x);
            y = step(step(y));
            d = gcd_u64(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

const TRIAL_LIMIT: u64 = 1_000_000;

/// Factor n by trial division up to 10^6, then Pollard rho on what remains.
pub fn factorize(n: u64) -> Result<FactorProfile, NumTheoryError> {
    if n == 0 {
        return Err(NumTheoryError::ZeroInput);
    }
    let mut factors: Vec<(u64, u32)> = Vec::new();
    let mut m = n;
    let push = |p: u64, factors: &mut Vec<(u64, u32)>, m: &mut u64| {
        let mut e = 0u32;
        while *m % p == 0 {
            *m /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
    };
    push(2, &mut factors, &mut m);
    let mut d = 3u64;
    while d <= TRIAL_LIMIT && d * d <= m {
        push(d, &mut factors, &mut m);
        d += 2;
    }
    if m > 1 {
        // Remaining part has no factor below 10^6: a prime, a semiprime, or
        // a prime power of large primes.
        let mut stack = vec![m];
        let mut large: Vec<u64> = Vec::new();
        while let Some(v) = stack.pop() {
            if is_prime(v) {
                large.push(v);
            } else {
                let f = pollard_rho(v);
                stack.push(f);
                stack.push(v / f);
            }
        }
        large.sort_unstable();
        let mut i = 0;
        while i < large.len() {
            let p = large[i];
            let mut e = 0u32;
            while i < large.len() && large[i] == p {
                e += 1;
                i += 1;
            }
            factors.push((p, e));
        }
    }
    factors.sort_unstable_by_key(|&(p, _)| p);
    debug_assert_eq!(
        factors
            .iter()
            .map(|&(p, e)| p.checked_pow(e).unwrap())
            .product::<u64>(),
        n
    );
    Ok(FactorProfile { value: n, factors })
}

/// Euler totient.
pub fn phi(n: u64) -> u64 {
    let profile = factorize(n).expect("phi of positive integer");
    let mut out = n;
    for p in profile.primes() {
        out = out / p * (p - 1);
    }
    out
}

/// Number of divisors.
pub fn tau(n: u64) -> u64 {
    let profile = factorize(n).expect("tau of positive integer");
    profile.factors.iter().map(|&(_, e)| e as u64 + 1).product()
}

/// All divisors in ascending order.
pub fn divisors(n: u64) -> Vec<u64> {
    let profile = factorize(n).expect("divisors of positive integer");
    let mut out = vec![1u64];
    for &(p, e) in &profile.factors {
        let prev = out.clone();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            out.extend(prev.iter().map(|d| d * pk));
        }
    }
    out.sort_unstable();
    out
}

/// Density of residue pairs p mod q with gcd(q, b p + a) = 1:
/// the product of (1 - p^-2) over primes p dividing q but not b.
pub fn coprime_box_density(q: u64, b: u64) -> Rational {
    let profile = factorize(q).expect("density of positive q");
    let mut out = Rational::one();
    for p in profile.primes() {
        if b % p != 0 {
            let p2 = rat_u64(p) * rat_u64(p);
            out *= Rational::one() - p2.recip();
        }
    }
    out
}

/// Euler product over every prime dividing q, ignoring b entirely. This is
/// the deliberately wrong density used by the falsification self-test of the
/// audit harness; it must disagree with the enumeration whenever q and b
/// share a prime.
pub fn coprime_box_density_ignoring_b(q: u64) -> Rational {
    coprime_box_density(q, 1)
}

/// Count residue pairs p in (Z/q)^2 with gcd(q, b p1 + a1, b p2 + a2) = 1 by
/// direct enumeration. Independent cross-check of `coprime_box_density`.
pub fn admissible_count_oracle(q: u64, a: (i64, i64), b: u64) -> Result<u64, NumTheoryError> {
    if q == 0 || b == 0 {
        return Err(NumTheoryError::ZeroInput);
    }
    let ga = gcd_u64(a.0.unsigned_abs(), a.1.unsigned_abs());
    if gcd_u64(ga, b) != 1 {
        return Err(NumTheoryError::NotCoprime);
    }
    let residue = |ai: i64, pi: u64| -> u64 {
        let v = (b as i128 * pi as i128 + ai as i128).rem_euclid(q as i128);
        v as u64
    };
    // gcd(q, b p1 + a1) per first coordinate, reused across the row.
    let g1: Vec<u64> = (0..q).map(|p1| gcd_u64(q, residue(a.0, p1))).collect();
    let r2: Vec<u64> = (0..q).map(|p2| residue(a.1, p2)).collect();
    let mut count = 0u64;
    for p1 in 0..q as usize {
        let g = g1[p1];
        if g == 1 {
            count += q;
        } else {
            for p2 in 0..q as usize {
                if gcd_u64(g, r2[p2]) == 1 {
                    count += 1;
                }
            }
        }
    }
    Ok(count)
}

/// Compare x^u with y^v for nonnegative rationals by integer cross-powering;
/// the workhorse behind every fractional-exponent threshold.
pub fn cmp_power(x: &Rational, u: u32, y: &Rational, v: u32) -> Ordering {
    assert!(!x.is_negative() && !y.is_negative(), "cmp_power needs x, y >= 0");
    // x^u <=> y^v  <=>  xn^u * yd^v <=> yn^v * xd^u
    let lhs = x.numer().pow(u) * y.denom().pow(v);
    let rhs = y.numer().pow(v) * x.denom().pow(u);
    lhs.cmp(&rhs)
}

/// floor(base^(num/den)) for positive integers, i.e. the largest k with
/// k^den <= base^num.
pub fn floor_pow(base: u64, num: u32, den: u32) -> u64 {
    assert!(base >= 1 && den >= 1);
    let target = BigInt::from(base).pow(num);
    let root = target.nth_root(den);
    // nth_root floors already; belt-and-braces adjust.
    let mut k = root;
    while k.pow(den) > target {
        k -= 1;
    }
    while (&k + 1u32).pow(den) <= target {
        k += 1;
    }
    u64::try_from(&k).expect("floor_pow fits u64 for in-range inputs")
}

/// Largest integer k with k^root_den * scale_den <= scale_num, i.e.
/// floor((scale_num / scale_den)^(1/root_den)). Used for grid-rounded
/// power-decay evaluation.
pub fn floor_root_of_ratio(scale_num: &BigInt, scale_den: &BigInt, root_den: u32) -> BigInt {
    assert!(!scale_num.is_negative() && scale_den.is_positive());
    if scale_num.is_zero() {
        return BigInt::zero();
    }
    // floor of the real root equals the root of the floor for integer k.
    let q = scale_num / scale_den;
    let mut k = q.nth_root(root_den);
    while &k.pow(root_den) * scale_den > *scale_num {
        k -= 1;
    }
    while &(&k + 1u32).pow(root_den) * scale_den <= *scale_num {
        k += 1;
    }
    k
}
