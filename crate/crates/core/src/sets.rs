//! Constructors, exact measures, membership, and pairwise intersection
//! measures for the approximation sets A_q (all residues) and the reduced
//! sets with the coprimality condition gcd(q, b p + a) = 1.
//!
//! A_q is a union of q^2 open boxes of halfwidth psi(q)/q centered at
//! (p + y)/q; with psi <= 1/2 the boxes are pairwise disjoint, which every
//! kernel here relies on.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::numtheory::{coprime_box_density, gcd_u64};
use crate::rational::{one_half, rat_u64, Rational};
use crate::target::ApproximantPair;
use crate::torus::{arc_overlap_length, frac_mod_1, progression_set, IntervalSet1D, TorusBox};

/// Default residue-enumeration cap for oracle-grade operations.
pub const DEFAULT_ORACLE_CAP: u64 = 200;
/// Default cap for closed forms and membership.
pub const DEFAULT_MEASURE_CAP: u64 = 10_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SetsError {
    #[error("psi(q) must be at most 1/2 (got {0})")]
    PsiTooLarge(String),
    #[error("psi(q) must be nonnegative")]
    PsiNegative,
    #[error("q = {q} exceeds the enumeration cap {cap}")]
    CapExceeded { q: u64, cap: u64 },
    #[error("tilde descriptor requires an approximant for the same q")]
    BadApproximant,
    #[error("descriptors must share the same shift y")]
    MismatchedShift,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Full,
    Tilde,
}

/// Symbolic description of one approximation set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetDescriptor {
    pub q: u64,
    pub psi_q: Rational,
    pub y: (Rational, Rational),
    pub variant: Variant,
    pub approximant: Option<ApproximantPair>,
}

impl SetDescriptor {
    pub fn full(q: u64, psi_q: Rational, y: (Rational, Rational)) -> Result<Self, SetsError> {
        check_psi(&psi_q)?;
        Ok(SetDescriptor {
            q,
            psi_q,
            y,
            variant: Variant::Full,
            approximant: None,
        })
    }

    pub fn tilde(
        q: u64,
        psi_q: Rational,
        y: (Rational, Rational),
        approximant: ApproximantPair,
    ) -> Result<Self, SetsError> {
        check_psi(&psi_q)?;
        if approximant.q != q {
            return Err(SetsError::BadApproximant);
        }
        Ok(SetDescriptor {
            q,
            psi_q,
            y,
            variant: Variant::Tilde,
            approximant: Some(approximant),
        })
    }

    /// Per-coordinate box halfwidth psi(q)/q.
    pub fn halfwidth(&self) -> Rational {
        &self.psi_q / rat_u64(self.q)
    }

    /// Residue tables for the coprimality filter: row_i[v] = (b v + a_i) mod q,
    /// and g1[v] = gcd(q, row_0[v]) precombined for the first coordinate.
    fn admissibility(&self) -> Option<AdmissibilityTables> {
        match self.variant {
            Variant::Full => None,
            Variant::Tilde => {
                let ap = self.approximant.as_ref().expect("tilde has approximant");
                let q = self.q;
                let qi = BigInt::from(q);
                let b = BigInt::from(ap.b);
                let rem = |a: &BigInt, v: u64| -> u64 {
                    let r = (&b * BigInt::from(v) + a).mod_floor(&qi);
                    u64::try_from(&r).expect("residue fits u64")
                };
                let row1: Vec<u64> = (0..q).map(|v| rem(&ap.a.1, v)).collect();
                let g0: Vec<u64> = (0..q).map(|v| gcd_u64(q, rem(&ap.a.0, v))).collect();
                Some(AdmissibilityTables { g0, row1 })
            }
        }
    }
}

struct AdmissibilityTables {
    /// gcd(q, b v + a_0) per residue v.
    g0: Vec<u64>,
    /// (b v + a_1) mod q per residue v.
    row1: Vec<u64>,
}

impl AdmissibilityTables {
    #[inline]
    fn admissible(&self, p0: usize, p1: usize) -> bool {
        let g = self.g0[p0];
        g == 1 || gcd_u64(g, self.row1[p1]) == 1
    }
}

fn check_psi(psi: &Rational) -> Result<(), SetsError> {
    if psi.is_negative() {
        return Err(SetsError::PsiNegative);
    }
    if *psi > one_half() {
        return Err(SetsError::PsiTooLarge(crate::rational::fmt_rational(psi)));
    }
    Ok(())
}

/// 4 psi^2 for the full set; times the Euler density over primes dividing q
/// but not b for the reduced set.
pub fn measure_closed_form(d: &SetDescriptor) -> Result<Rational, SetsError> {
    check_psi(&d.psi_q)?;
    let base = rat_u64(4) * &d.psi_q * &d.psi_q;
    Ok(match d.variant {
        Variant::Full => base,
        Variant::Tilde => {
            let b = d.approximant.as_ref().ok_or(SetsError::BadApproximant)?.b;
            base * coprime_box_density(d.q, b)
        }
    })
}

/// Independent oracle: enumerate the (admissible) residues p in (Z/q)^2 and
/// sum the exact areas of their boxes, which are disjoint for psi <= 1/2.
pub fn measure_oracle(d: &SetDescriptor, cap: u64) -> Result<Rational, SetsError> {
    check_psi(&d.psi_q)?;
    if d.q > cap {
        return Err(SetsError::CapExceeded { q: d.q, cap });
    }
    let q = d.q;
    let count: u64 = match d.admissibility() {
        None => q * q,
        Some(tables) => {
            let mut c = 0u64;
            for p0 in 0..q as usize {
                if tables.g0[p0] == 1 {
                    c += q;
                } else {
                    for p1 in 0..q as usize {
                        if tables.admissible(p0, p1) {
                            c += 1;
                        }
                    }
                }
            }
            c
        }
    };
    let side = rat_u64(2) * d.halfwidth();
    Ok(rat_u64(count) * &side * &side)
}

/// Strict sup-norm membership: p is the nearest integer vector to q x - y
/// (both candidates at exact half-integer ties), the inequality is strict,
/// and the reduced variant additionally requires gcd(q, b p + a) = 1.
pub fn member(x: &(Rational, Rational), d: &SetDescriptor) -> bool {
    if d.psi_q.is_zero() {
        return false;
    }
    let v0 = rat_u64(d.q) * &x.0 - &d.y.0;
    let v1 = rat_u64(d.q) * &x.1 - &d.y.1;
    let cands = |v: &Rational| -> Vec<BigInt> {
        let fl = v.floor().to_integer();
        let mut out = Vec::with_capacity(2);
        for dlt in 0u32..=1 {
            let p = &fl + BigInt::from(dlt);
            if (v - Rational::from_integer(p.clone())).abs() < d.psi_q {
                out.push(p);
            }
        }
        out
    };
    let c0 = cands(&v0);
    let c1 = cands(&v1);
    if c0.is_empty() || c1.is_empty() {
        return false;
    }
    match d.variant {
        Variant::Full => true,
        Variant::Tilde => {
            let ap = d.approximant.as_ref().expect("tilde has approximant");
            let qi = BigInt::from(d.q);
            let b = BigInt::from(ap.b);
            c0.iter().any(|p0| {
                let r0 = (&b * p0 + &ap.a.0).mod_floor(&qi);
                c1.iter().any(|p1| {
                    let r1 = (&b * p1 + &ap.a.1).mod_floor(&qi);
                    qi.gcd(&r0).gcd(&r1) == BigInt::from(1u32)
                })
            })
        }
    }
}

/// The 1-D factor of the full set in coordinate i.
pub fn coordinate_factor(d: &SetDescriptor, coord: usize) -> Result<IntervalSet1D, SetsError> {
    check_psi(&d.psi_q)?;
    let offset = if coord == 0 { &d.y.0 } else { &d.y.1 };
    progression_set(d.q, offset, &d.halfwidth()).map_err(|_| {
        SetsError::PsiTooLarge(crate::rational::fmt_rational(&d.psi_q))
    })
}

/// Exact measure of the pairwise intersection.
///
/// full x full uses the 1-D product decomposition; any reduced operand uses
/// aligned-candidate enumeration over the residues of the finer set, with
/// the O(1) nearby boxes of the coarser set located per coordinate.
pub fn pair_intersection_measure(
    d1: &SetDescriptor,
    d2: &SetDescriptor,
    cap: u64,
) -> Result<Rational, SetsError> {
    if d1.y != d2.y {
        return Err(SetsError::MismatchedShift);
    }
    check_psi(&d1.psi_q)?;
    check_psi(&d2.psi_q)?;
    if d1 == d2 {
        return measure_closed_form(d1);
    }
    if d1.psi_q.is_zero() || d2.psi_q.is_zero() {
        return Ok(Rational::zero());
    }
    if d1.variant == Variant::Full && d2.variant == Variant::Full {
        let m0 = coordinate_factor(d1, 0)?.intersect(&coordinate_factor(d2, 0)?);
        let m1 = coordinate_factor(d1, 1)?.intersect(&coordinate_factor(d2, 1)?);
        return Ok(m0.measure() * m1.measure());
    }
    let (fine, coarse) = if d1.q >= d2.q { (d1, d2) } else { (d2, d1) };
    if fine.q > cap {
        return Err(SetsError::CapExceeded { q: fine.q, cap });
    }
    aligned_enumeration(fine, coarse)
}

/// Per-coordinate candidates of the coarser set near each residue of the
/// finer set, with interned exact overlap lengths.
struct CoordinateCandidates {
    /// For each fine residue: (coarse residue, index into `lens`).
    per_residue: Vec<Vec<(u64, u32)>>,
    lens: Vec<Rational>,
}

fn coordinate_candidates(
    fine: &SetDescriptor,
    coarse: &SetDescriptor,
    coord: usize,
) -> CoordinateCandidates {
    let y_i = if coord == 0 { &fine.y.0 } else { &fine.y.1 };
    let hf = fine.halfwidth();
    let hc = coarse.halfwidth();
    let reach = &hf + &hc;
    let cq = rat_u64(coarse.q);
    let mut lens: Vec<Rational> = Vec::new();
    let mut intern: HashMap<Rational, u32> = HashMap::new();
    let mut per_residue = Vec::with_capacity(fine.q as usize);
    for pf in 0..fine.q {
        let center_f = frac_mod_1(&((rat_u64(pf) + y_i) / rat_u64(fine.q)));
        // Solve |center_f - (s + y_i)/cq| < reach (mod 1) for integer s.
        let lo = (&cq * (&center_f - &reach)) - y_i;
        let hi = (&cq * (&center_f + &reach)) - y_i;
        let mut found: Vec<(u64, u32)> = Vec::new();
        let mut s = lo.floor().to_integer();
        let hi_int = hi.ceil().to_integer();
        while s <= hi_int {
            let residue =
                u64::try_from(&s.mod_floor(&BigInt::from(coarse.q))).expect("residue fits");
            if !found.iter().any(|&(r, _)| r == residue) {
                let center_c = frac_mod_1(&((rat_u64(residue) + y_i) / &cq));
                let len = arc_overlap_length(&center_f, &hf, &center_c, &hc);
                if len.is_positive() {
                    let idx = *intern.entry(len.clone()).or_insert_with(|| {
                        lens.push(len.clone());
                        (lens.len() - 1) as u32
                    });
                    found.push((residue, idx));
                }
            }
            s += 1;
        }
        per_residue.push(found);
    }
    CoordinateCandidates { per_residue, lens }
}

fn aligned_enumeration(fine: &SetDescriptor, coarse: &SetDescriptor) -> Result<Rational, SetsError> {
    let cand0 = coordinate_candidates(fine, coarse, 0);
    let cand1 = coordinate_candidates(fine, coarse, 1);
    let fine_adm = fine.admissibility();
    let fq = fine.q as usize;

    match coarse.admissibility() {
        None => {
            // Coarse set is unfiltered: collapse each coordinate to the total
            // overlap per fine residue, then count admissible residue pairs
            // per pair of totals.
            let (tot0, vals0) = totals_per_residue(&cand0);
            let (tot1, vals1) = totals_per_residue(&cand1);
            let mut counts = vec![0u64; vals0.len() * vals1.len()];
            for p0 in 0..fq {
                let t0 = tot0[p0];
                if vals0[t0 as usize].is_zero() {
                    continue;
                }
                let row = t0 as usize * vals1.len();
                for p1 in 0..fq {
                    let t1 = tot1[p1];
                    if vals1[t1 as usize].is_zero() {
                        continue;
                    }
                    if let Some(adm) = &fine_adm {
                        if !adm.admissible(p0, p1) {
                            continue;
                        }
                    }
                    counts[row + t1 as usize] += 1;
                }
            }
            let mut acc = Rational::zero();
            for (i, v0) in vals0.iter().enumerate() {
                for (j, v1) in vals1.iter().enumerate() {
                    let c = counts[i * vals1.len() + j];
                    if c > 0 {
                        acc += rat_u64(c) * v0 * v1;
                    }
                }
            }
            Ok(acc)
        }
        Some(coarse_adm) => {
            // Both filters active: visit the O(1) candidate pairs per fine
            // residue pair and keep those passing the coarse filter.
            let mut counts: HashMap<(u32, u32), u64> = HashMap::new();
            for p0 in 0..fq {
                if cand0.per_residue[p0].is_empty() {
                    continue;
                }
                for p1 in 0..fq {
                    if cand1.per_residue[p1].is_empty() {
                        continue;
                    }
                    if let Some(adm) = &fine_adm {
                        if !adm.admissible(p0, p1) {
                            continue;
                        }
                    }
                    for &(s0, l0) in &cand0.per_residue[p0] {
                        for &(s1, l1) in &cand1.per_residue[p1] {
                            if coarse_adm.admissible(s0 as usize, s1 as usize) {
                                *counts.entry((l0, l1)).or_insert(0) += 1;
                            }
                        }
                    }
                }
            }
            let mut acc = Rational::zero();
            for ((l0, l1), c) in counts {
                acc += rat_u64(c) * &cand0.lens[l0 as usize] * &cand1.lens[l1 as usize];
            }
            Ok(acc)
        }
    }
}

/// Total overlap length per fine residue, interned: returns (index per
/// residue, distinct totals).
fn totals_per_residue(c: &CoordinateCandidates) -> (Vec<u32>, Vec<Rational>) {
    let mut vals: Vec<Rational> = Vec::new();
    let mut intern: HashMap<Rational, u32> = HashMap::new();
    let idxs = c
        .per_residue
        .iter()
        .map(|cands| {
            let total: Rational = cands
                .iter()
                .map(|&(_, l)| c.lens[l as usize].clone())
                .sum();
            *intern.entry(total.clone()).or_insert_with(|| {
                vals.push(total.clone());
                (vals.len() - 1) as u32
            })
        })
        .collect();
    (idxs, vals)
}

/// Exact measure of the set restricted to the window U: enumerate the
/// (admissible) boxes and accumulate their exact overlap areas with U.
pub fn window_measure(d: &SetDescriptor, u: &TorusBox, cap: u64) -> Result<Rational, SetsError> {
    check_psi(&d.psi_q)?;
    if d.q > cap {
        return Err(SetsError::CapExceeded { q: d.q, cap });
    }
    if d.psi_q.is_zero() || u.halfwidth.0.is_zero() || u.halfwidth.1.is_zero() {
        return Ok(Rational::zero());
    }
    let h = d.halfwidth();
    let q = d.q;
    // Per-coordinate overlap of each residue's arc with the window's side.
    let overlaps = |y_i: &Rational, uc: &Rational, uh: &Rational| -> Vec<Rational> {
        (0..q)
            .map(|p| {
                let center = frac_mod_1(&((rat_u64(p) + y_i) / rat_u64(q)));
                arc_overlap_length(&center, &h, uc, uh)
            })
            .collect()
    };
    let o0 = overlaps(&d.y.0, &u.center.0, &u.halfwidth.0);
    let o1 = overlaps(&d.y.1, &u.center.1, &u.halfwidth.1);
    let adm = d.admissibility();
    let mut acc = Rational::zero();
    for p0 in 0..q as usize {
        if o0[p0].is_zero() {
            continue;
        }
        for p1 in 0..q as usize {
            if o1[p1].is_zero() {
                continue;
            }
            if let Some(t) = &adm {
                if !t.admissible(p0, p1) {
                    continue;
                }
            }
            acc += &o0[p0] * &o1[p1];
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::target::Target;
    use num_traits::One;

    fn zero_y() -> (Rational, Rational) {
        (Rational::zero(), Rational::zero())
    }

    fn approximant_for(y: (Rational, Rational), delta: Rational, q: u64) -> ApproximantPair {
        Target::new(y, delta).unwrap().approximant(q).unwrap()
    }

    /// Fixed approximant (q=12, b=5, a=(1,0)) used by the worked examples.
    fn example_pair_12() -> ApproximantPair {
        ApproximantPair {
            q: 12,
            b: 5,
            a: (BigInt::from(1), BigInt::from(0)),
            sup_error: Rational::zero(),
        }
    }

    #[test]
    fn closed_form_examples() {
        let full = SetDescriptor::full(5, rat(1, 10), zero_y()).unwrap();
        assert_eq!(measure_closed_form(&full).unwrap(), rat(1, 25));

        let tilde = SetDescriptor::tilde(12, rat(1, 4), zero_y(), example_pair_12()).unwrap();
        assert_eq!(measure_closed_form(&tilde).unwrap(), rat(1, 6));

        let zero = SetDescriptor::full(7, Rational::zero(), zero_y()).unwrap();
        assert_eq!(measure_closed_form(&zero).unwrap(), Rational::zero());

        assert!(SetDescriptor::full(3, rat(3, 4), zero_y()).is_err());
    }

    #[test]
    fn oracle_examples() {
        let whole = SetDescriptor::full(1, rat(1, 2), zero_y()).unwrap();
        assert_eq!(measure_oracle(&whole, 200).unwrap(), Rational::one());

        let tilde = SetDescriptor::tilde(12, rat(1, 4), zero_y(), example_pair_12()).unwrap();
        assert_eq!(measure_oracle(&tilde, 200).unwrap(), rat(1, 6));

        // b sharing all primes of q: empty Euler product, equals full measure.
        let shared = ApproximantPair {
            q: 12,
            b: 6,
            a: (BigInt::from(1), BigInt::from(1)),
            sup_error: Rational::zero(),
        };
        let t = SetDescriptor::tilde(12, rat(1, 4), zero_y(), shared).unwrap();
        let f = SetDescriptor::full(12, rat(1, 4), zero_y()).unwrap();
        assert_eq!(
            measure_oracle(&t, 200).unwrap(),
            measure_closed_form(&f).unwrap()
        );

        let capped = SetDescriptor::full(300, rat(1, 4), zero_y()).unwrap();
        assert!(matches!(
            measure_oracle(&capped, 200),
            Err(SetsError::CapExceeded { .. })
        ));
    }

    #[test]
    fn oracle_matches_closed_form_grid() {
        let y = (rat(1, 3), rat(2, 3));
        let t = Target::new(y.clone(), rat(3, 1)).unwrap();
        for q in 1..=40u64 {
            for psi in [rat(1, 4), rat(1, 10)] {
                let full = SetDescriptor::full(q, psi.clone(), y.clone()).unwrap();
                assert_eq!(
                    measure_oracle(&full, 200).unwrap(),
                    measure_closed_form(&full).unwrap(),
                    "full q={q}"
                );
                let ap = t.approximant(q).unwrap();
                let tilde = SetDescriptor::tilde(q, psi.clone(), y.clone(), ap).unwrap();
                assert_eq!(
                    measure_oracle(&tilde, 200).unwrap(),
                    measure_closed_form(&tilde).unwrap(),
                    "tilde q={q}"
                );
            }
        }
    }

    #[test]
    fn self_intersection_is_closed_form() {
        let y = (rat(1, 3), rat(2, 3));
        let ap = approximant_for(y.clone(), rat(3, 1), 10);
        let d = SetDescriptor::tilde(10, rat(1, 10), y, ap).unwrap();
        assert_eq!(
            pair_intersection_measure(&d, &d, 200).unwrap(),
            measure_closed_form(&d).unwrap()
        );
    }

    #[test]
    fn full_full_product_example() {
        let a = SetDescriptor::full(2, rat(1, 4), zero_y()).unwrap();
        let b = SetDescriptor::full(3, rat(1, 4), zero_y()).unwrap();
        assert_eq!(pair_intersection_measure(&a, &b, 200).unwrap(), rat(1, 16));
    }

    #[test]
    fn product_decomposition_matches_box_pairs() {
        for (q, r) in [(2u64, 3u64), (4, 6), (5, 5)] {
            let a = SetDescriptor::full(q, rat(1, 4), zero_y()).unwrap();
            let b = SetDescriptor::full(r, rat(1, 5), zero_y()).unwrap();
            let product = pair_intersection_measure(&a, &b, 200).unwrap();
            let brute = brute_force_box_pairs(&a, &b);
            assert_eq!(product, brute, "q={q} r={r}");
        }
    }

    /// Test-only oracle: enumerate all q^2 x r^2 box pairs.
    fn brute_force_box_pairs(a: &SetDescriptor, b: &SetDescriptor) -> Rational {
        let ha = a.halfwidth();
        let hb = b.halfwidth();
        let centers = |d: &SetDescriptor, coord: usize| -> Vec<Rational> {
            let y_i = if coord == 0 { &d.y.0 } else { &d.y.1 };
            (0..d.q)
                .map(|p| frac_mod_1(&((rat_u64(p) + y_i) / rat_u64(d.q))))
                .collect()
        };
        let (a0, a1) = (centers(a, 0), centers(a, 1));
        let (b0, b1) = (centers(b, 0), centers(b, 1));
        let mut acc = Rational::zero();
        for ca0 in &a0 {
            for cb0 in &b0 {
                let l0 = arc_overlap_length(ca0, &ha, cb0, &hb);
                if l0.is_zero() {
                    continue;
                }
                for ca1 in &a1 {
                    for cb1 in &b1 {
                        let l1 = arc_overlap_length(ca1, &ha, cb1, &hb);
                        acc += &l0 * &l1;
                    }
                }
            }
        }
        acc
    }

    #[test]
    fn tilde_full_disjoint_pair() {
        // q=100, r=50, delta=3, psi(q)=q^-3: the large-gcd regime.
        let y = (rat(1, 3), rat(2, 3));
        let t = Target::new(y.clone(), rat(3, 1)).unwrap();
        let ap = t.approximant(100).unwrap();
        let dq = SetDescriptor::tilde(100, rat(1, 1_000_000), y.clone(), ap).unwrap();
        let dr = SetDescriptor::full(50, rat(1, 125_000), y).unwrap();
        assert_eq!(
            pair_intersection_measure(&dq, &dr, 200).unwrap(),
            Rational::zero()
        );
    }

    #[test]
    fn tilde_pair_symmetric_and_cross_checked() {
        let y = (rat(1, 3), rat(2, 3));
        let t = Target::new(y.clone(), rat(1, 2)).unwrap();
        for (q, r) in [(6u64, 4u64), (9, 6), (10, 4), (12, 8)] {
            let dq =
                SetDescriptor::tilde(q, rat(1, 4), y.clone(), t.approximant(q).unwrap()).unwrap();
            let dr =
                SetDescriptor::tilde(r, rat(1, 4), y.clone(), t.approximant(r).unwrap()).unwrap();
            let m_qr = pair_intersection_measure(&dq, &dr, 200).unwrap();
            let m_rq = pair_intersection_measure(&dr, &dq, 200).unwrap();
            assert_eq!(m_qr, m_rq, "symmetry q={q} r={r}");
            let brute = brute_force_tilde_pairs(&dq, &dr);
            assert_eq!(m_qr, brute, "brute force q={q} r={r}");
        }
    }

    /// Test-only oracle for filtered pairs: all residue pairs on both sides.
    fn brute_force_tilde_pairs(a: &SetDescriptor, b: &SetDescriptor) -> Rational {
        let ha = a.halfwidth();
        let hb = b.halfwidth();
        let adm = |d: &SetDescriptor, p0: u64, p1: u64| -> bool {
            match &d.approximant {
                None => true,
                Some(ap) => {
                    let qi = BigInt::from(d.q);
                    let bb = BigInt::from(ap.b);
                    let r0 = (&bb * BigInt::from(p0) + &ap.a.0).mod_floor(&qi);
                    let r1 = (&bb * BigInt::from(p1) + &ap.a.1).mod_floor(&qi);
                    qi.gcd(&r0).gcd(&r1) == BigInt::from(1u32)
                }
            }
        };
        let center = |d: &SetDescriptor, coord: usize, p: u64| -> Rational {
            let y_i = if coord == 0 { &d.y.0 } else { &d.y.1 };
            frac_mod_1(&((rat_u64(p) + y_i) / rat_u64(d.q)))
        };
        let mut acc = Rational::zero();
        for pa0 in 0..a.q {
            for pa1 in 0..a.q {
                if !adm(a, pa0, pa1) {
                    continue;
                }
                for pb0 in 0..b.q {
                    let l0 = arc_overlap_length(&center(a, 0, pa0), &ha, &center(b, 0, pb0), &hb);
                    if l0.is_zero() {
                        continue;
                    }
                    for pb1 in 0..b.q {
                        if !adm(b, pb0, pb1) {
                            continue;
                        }
                        let l1 =
                            arc_overlap_length(&center(a, 1, pa1), &ha, &center(b, 1, pb1), &hb);
                        acc += &l0 * &l1;
                    }
                }
            }
        }
        acc
    }

    #[test]
    fn monotone_tilde_below_full() {
        let y = (rat(1, 3), rat(2, 3));
        let t = Target::new(y.clone(), rat(3, 1)).unwrap();
        for q in 1..=60u64 {
            let ap = t.approximant(q).unwrap();
            let tilde = SetDescriptor::tilde(q, rat(1, 4), y.clone(), ap).unwrap();
            let full = SetDescriptor::full(q, rat(1, 4), y.clone()).unwrap();
            let mt = measure_closed_form(&tilde).unwrap();
            let mf = measure_closed_form(&full).unwrap();
            assert!(mt <= mf);
            // Ratio exceeds 3/5 (rational stand-in for 6/pi^2).
            assert!(&mt * rat(5, 3) > mf, "q={q}");
        }
    }

    #[test]
    fn member_examples() {
        // x exactly at a box center.
        let y = (rat(1, 3), rat(2, 3));
        let q = 7u64;
        let d = SetDescriptor::full(q, rat(1, 10), y.clone()).unwrap();
        let p = (BigInt::from(2), BigInt::from(5));
        let x = (
            frac_mod_1(&((Rational::from_integer(p.0) + &y.0) / rat_u64(q))),
            frac_mod_1(&((Rational::from_integer(p.1) + &y.1) / rat_u64(q))),
        );
        assert!(member(&x, &d));

        let zero = SetDescriptor::full(q, Rational::zero(), y).unwrap();
        assert!(!member(&x, &zero));

        // Reduced variant rejecting an inadmissible residue: q=12, b=5,
        // a=(1,0), p=(1,0): gcd(12, 6, 0) = 6.
        let d12 = SetDescriptor::tilde(12, rat(1, 8), zero_y(), example_pair_12()).unwrap();
        let x12 = (rat(1, 12), Rational::zero());
        assert!(!member(&x12, &d12));
        // The same point belongs to the unfiltered set.
        let f12 = SetDescriptor::full(12, rat(1, 8), zero_y()).unwrap();
        assert!(member(&x12, &f12));
    }

    #[test]
    fn member_agrees_with_oracle_measure_structure() {
        // Membership is true exactly on the admissible boxes: spot-check by
        // sampling centers.
        let y = (rat(1, 3), rat(2, 3));
        let t = Target::new(y.clone(), rat(3, 1)).unwrap();
        let q = 12u64;
        let ap = t.approximant(q).unwrap();
        let d = SetDescriptor::tilde(q, rat(1, 4), y.clone(), ap.clone()).unwrap();
        let tables = d.admissibility().unwrap();
        for p0 in 0..q {
            for p1 in 0..q {
                let x = (
                    frac_mod_1(&((rat_u64(p0) + &y.0) / rat_u64(q))),
                    frac_mod_1(&((rat_u64(p1) + &y.1) / rat_u64(q))),
                );
                assert_eq!(
                    member(&x, &d),
                    tables.admissible(p0 as usize, p1 as usize),
                    "p=({p0},{p1})"
                );
            }
        }
    }

    #[test]
    fn window_examples() {
        let y = (rat(1, 3), rat(2, 3));
        let t = Target::new(y.clone(), rat(3, 1)).unwrap();
        let ap = t.approximant(12).unwrap();
        let d = SetDescriptor::tilde(12, rat(1, 4), y, ap).unwrap();

        let full_window = TorusBox::new(
            (rat(1, 2), rat(1, 2)),
            (rat(1, 2), rat(1, 2)),
        )
        .unwrap();
        assert_eq!(
            window_measure(&d, &full_window, 200).unwrap(),
            measure_closed_form(&d).unwrap()
        );

        let degenerate = TorusBox::new(
            (rat(1, 2), rat(1, 2)),
            (Rational::zero(), rat(1, 4)),
        )
        .unwrap();
        assert_eq!(window_measure(&d, &degenerate, 200).unwrap(), Rational::zero());
    }

    #[test]
    fn mismatched_shift_rejected() {
        let a = SetDescriptor::full(2, rat(1, 4), zero_y()).unwrap();
        let b = SetDescriptor::full(3, rat(1, 4), (rat(1, 3), rat(2, 3))).unwrap();
        assert_eq!(
            pair_intersection_measure(&a, &b, 200),
            Err(SetsError::MismatchedShift)
        );
    }
}
