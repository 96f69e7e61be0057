//! Exact geometry of unions of rational intervals on the circle [0,1) and
//! axis-aligned boxes on the 2-torus. Everything is value-semantic and
//! normalized: pieces sorted, disjoint, half-open [lo, hi).

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{fmt_rational, rat_u64, Rational};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TorusError {
    #[error("halfwidth must be nonnegative")]
    NegativeHalfwidth,
    #[error("halfwidth {hw} exceeds 1/(2q) for q = {q}; progression boxes would merge")]
    HalfwidthTooLarge { q: u64, hw: String },
    #[error("box halfwidths must be at most 1/2")]
    BoxTooLarge,
}

/// Normalized list of disjoint half-open rational subintervals of [0,1).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IntervalSet1D {
    pieces: Vec<(Rational, Rational)>,
}

impl IntervalSet1D {
    pub fn empty() -> Self {
        IntervalSet1D { pieces: Vec::new() }
    }

    pub fn full_circle() -> Self {
        IntervalSet1D {
            pieces: vec![(Rational::zero(), Rational::one())],
        }
    }

    /// Build from arbitrary (lo, hi) pieces with 0 <= lo, hi <= 1; empty and
    /// inverted pieces are dropped, overlapping and touching pieces merged.
    pub fn from_pieces(raw: Vec<(Rational, Rational)>) -> Self {
        let mut pieces: Vec<(Rational, Rational)> = raw
            .into_iter()
            .filter(|(lo, hi)| lo < hi)
            .inspect(|(lo, hi)| {
                debug_assert!(!lo.is_negative() && *hi <= Rational::one());
            })
            .collect();
        pieces.sort();
        let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(pieces.len());
        for (lo, hi) in pieces {
            match out.last_mut() {
                Some((_, end)) if lo <= *end => {
                    if hi > *end {
                        *end = hi;
                    }
                }
                _ => out.push((lo, hi)),
            }
        }
        IntervalSet1D { pieces: out }
    }

    pub fn pieces(&self) -> &[(Rational, Rational)] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Exact total length.
    pub fn measure(&self) -> Rational {
        let mut acc = Rational::zero();
        for (lo, hi) in &self.pieces {
            acc += hi - lo;
        }
        acc
    }

    /// Exact intersection by a two-pointer sweep over sorted pieces.
    pub fn intersect(&self, other: &IntervalSet1D) -> IntervalSet1D {
        let mut out = Vec::new();
        let (mut i, mut j) = (0usize, 0usize);
        while i < self.pieces.len() && j < other.pieces.len() {
            let (alo, ahi) = &self.pieces[i];
            let (blo, bhi) = &other.pieces[j];
            let lo = alo.max(blo);
            let hi = ahi.min(bhi);
            if lo < hi {
                out.push((lo.clone(), hi.clone()));
            }
            if ahi <= bhi {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalSet1D { pieces: out }
    }

    pub fn union(&self, other: &IntervalSet1D) -> IntervalSet1D {
        let mut all = self.pieces.clone();
        all.extend(other.pieces.iter().cloned());
        IntervalSet1D::from_pieces(all)
    }

    /// Strict-interior membership, matching the open boxes of the paper's
    /// inequality; endpoints never belong.
    pub fn contains_interior(&self, x: &Rational) -> bool {
        self.pieces.iter().any(|(lo, hi)| lo < x && x < hi)
    }

    /// Debug serialization: "lo_num/lo_den,hi_num/hi_den;...".
    pub fn to_debug_string(&self) -> String {
        self.pieces
            .iter()
            .map(|(lo, hi)| format!("{},{}", fmt_rational(lo), fmt_rational(hi)))
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// Reduce x into [0, 1).
pub fn frac_mod_1(x: &Rational) -> Rational {
    x - Rational::from_integer(x.floor().to_integer())
}

/// The q disjoint intervals of centers (k + offset)/q, k = 0..q-1, each of
/// length 2*halfwidth, reduced mod 1. This is the 1-D factor of A_q:
/// {x : ||q x - offset|| < halfwidth * q}.
pub fn progression_set(
    q: u64,
    offset: &Rational,
    halfwidth: &Rational,
) -> Result<IntervalSet1D, TorusError> {
    assert!(q >= 1);
    if halfwidth.is_negative() {
        return Err(TorusError::NegativeHalfwidth);
    }
    if halfwidth * rat_u64(2 * q) > Rational::one() {
        return Err(TorusError::HalfwidthTooLarge {
            q,
            hw: fmt_rational(halfwidth),
        });
    }
    if halfwidth.is_zero() {
        return Ok(IntervalSet1D::empty());
    }
    let offset = frac_mod_1(offset);
    let mut pieces = Vec::with_capacity(q as usize + 1);
    for k in 0..q {
        let center = (rat_u64(k) + &offset) / rat_u64(q);
        let lo = &center - halfwidth;
        let hi = &center + halfwidth;
        // lo in (-1/(2q), 1), hi in (0, 1 + 1/(2q)): at most one wrap.
        if lo.is_negative() {
            pieces.push((lo + Rational::one(), Rational::one()));
            pieces.push((Rational::zero(), hi));
        } else if hi > Rational::one() {
            pieces.push((lo, Rational::one()));
            pieces.push((Rational::zero(), hi - Rational::one()));
        } else {
            pieces.push((lo, hi));
        }
    }
    Ok(IntervalSet1D::from_pieces(pieces))
}

/// Axis-aligned open box on the 2-torus given by center and halfwidths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusBox {
    pub center: (Rational, Rational),
    pub halfwidth: (Rational, Rational),
}

impl TorusBox {
    pub fn new(center: (Rational, Rational), halfwidth: (Rational, Rational)) -> Result<Self, TorusError> {
        for h in [&halfwidth.0, &halfwidth.1] {
            if h.is_negative() {
                return Err(TorusError::NegativeHalfwidth);
            }
            if *h > crate::rational::one_half() {
                return Err(TorusError::BoxTooLarge);
            }
        }
        Ok(TorusBox { center, halfwidth })
    }

    pub fn area(&self) -> Rational {
        rat_u64(4) * &self.halfwidth.0 * &self.halfwidth.1
    }
}

/// Exact overlap length on the circle of two arcs (c1 +- h1) and (c2 +- h2),
/// each of length at most 1, by lifting one copy through shifts -1, 0, +1
/// and clipping.
pub fn arc_overlap_length(
    c1: &Rational,
    h1: &Rational,
    c2: &Rational,
    h2: &Rational,
) -> Rational {
    let mut acc = Rational::zero();
    let (a_lo, a_hi) = (c1 - h1, c1 + h1);
    for k in -1i32..=1 {
        let shift = Rational::from_integer(k.into());
        let b_lo = c2 - h2 + &shift;
        let b_hi = c2 + h2 + &shift;
        let lo = a_lo.clone().max(b_lo);
        let hi = a_hi.clone().min(b_hi);
        if lo < hi {
            acc += hi - lo;
        }
    }
    acc
}
