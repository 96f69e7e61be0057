//! The exact scalar type used everywhere: arbitrary-precision signed
//! fractions, always in lowest terms with positive denominator.
//!
//! Backed by `num_rational::BigRational`, which maintains exactly the
//! invariants we need (reduced form, denominator >= 1, zero is 0/1).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid integer part in rational literal: {0}")]
    BadInteger(String),
    #[error("zero denominator in rational literal")]
    ZeroDenominator,
}

/// Shorthand constructor from machine integers.
pub fn rat(num: i64, den: i64) -> Rational {
    assert!(den != 0, "zero denominator");
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_u64(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parse "num/den" or a bare integer "num".
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let (num_s, den_s) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let num: BigInt = num_s
        .parse()
        .map_err(|_| ParseRationalError::BadInteger(num_s.to_string()))?;
    let den: BigInt = match den_s {
        Some(d) => d
            .parse()
            .map_err(|_| ParseRationalError::BadInteger(d.to_string()))?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(ParseRationalError::ZeroDenominator);
    }
    Ok(Rational::new(num, den))
}

/// Render as "num/den" unconditionally (integers print as "n/1") so that
/// output lines diff exactly.
pub fn fmt_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// k-digit decimal approximation (round toward zero), for human-readable
/// output columns only.
pub fn decimal_approx(r: &Rational, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = (r * Rational::from_integer(scale)).trunc();
    let v = scaled.numer();
    let neg = v.is_negative();
    let abs = v.abs().to_string();
    let digits = digits as usize;
    let (int_part, frac_part) = if abs.len() > digits {
        let (i, f) = abs.split_at(abs.len() - digits);
        (i.to_string(), f.to_string())
    } else {
        ("0".to_string(), format!("{:0>width$}", abs, width = digits))
    };
    let sign = if neg { "-" } else { "" };
    if frac_part.is_empty() {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

/// Lossy conversion for sanity cross-checks in tests; never used on the
/// exact computation paths.
pub fn to_f64(r: &Rational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

pub fn one_half() -> Rational {
    rat(1, 2)
}
