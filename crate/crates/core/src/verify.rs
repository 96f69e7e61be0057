//! One operation per lemma or inequality of the argument: exact size
//! formulas, the gcd-sum divisor identity, the restricted divisor bound,
//! large-gcd disjointness, overlap ratios, and the quasi-independence ratio
//! feeding the divergence Borel-Cantelli lemma.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::numtheory::{
    cmp_power, coprime_box_density_ignoring_b, divisors, gcd_u64, phi, tau,
};
use crate::psi::PsiFunction;
use crate::rational::{fmt_rational, rat_u64, Rational};
use crate::sets::{
    measure_closed_form, measure_oracle, pair_intersection_measure, SetDescriptor, SetsError,
};
use crate::target::{Target, TargetError};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("precondition q > r >= 1 violated (q = {q}, r = {r})")]
    BadPair { q: u64, r: u64 },
    #[error("psi vanishes identically up to Q; the ratio is undefined")]
    AllZeroPsi,
    #[error(transparent)]
    Sets(#[from] SetsError),
    #[error(transparent)]
    Target(#[from] TargetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LemmaId {
    BasicSize,
    Overlap,
    Key,
    DivisorIdentity,
    DivisorBound,
    Ratio,
}

impl LemmaId {
    pub fn as_str(&self) -> &'static str {
        match self {
            LemmaId::BasicSize => "basic-size",
            LemmaId::Overlap => "overlap",
            LemmaId::Key => "key",
            LemmaId::DivisorIdentity => "divisor-identity",
            LemmaId::DivisorBound => "divisor-bound",
            LemmaId::Ratio => "ratio",
        }
    }
}

/// Outcome of auditing one lemma at one parameter point.
#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    pub lemma_id: LemmaId,
    pub parameters: BTreeMap<String, String>,
    pub hypothesis_satisfied: bool,
    pub conclusion_verified: bool,
    pub witness: Option<String>,
    pub computed_values: BTreeMap<String, String>,
}

impl LemmaReport {
    fn new(
        lemma_id: LemmaId,
        parameters: BTreeMap<String, String>,
        hypothesis_satisfied: bool,
        conclusion_holds: bool,
        witness: Option<String>,
        computed_values: BTreeMap<String, String>,
    ) -> Self {
        LemmaReport {
            lemma_id,
            parameters,
            hypothesis_satisfied,
            // Invariant: no conclusion claim without a satisfied hypothesis.
            conclusion_verified: hypothesis_satisfied && conclusion_holds,
            witness,
            computed_values,
        }
    }

    /// A falsification: hypothesis held but the claimed conclusion failed.
    pub fn falsified(&self) -> bool {
        self.hypothesis_satisfied && !self.conclusion_verified
    }
}

/// How to compute the Euler factor of the reduced-set closed form.
/// `DropApproximantDenominator` is intentionally wrong (the falsification
/// self-test of the audit harness).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EulerProductMode {
    Standard,
    DropApproximantDenominator,
}

/// Audit of the size formulas: oracle enumeration must equal the closed form
/// for both the full and the reduced set.
pub fn verify_basic_size(
    q: u64,
    psi_q: &Rational,
    target: &Target,
    mode: EulerProductMode,
    cap: u64,
) -> Result<LemmaReport, VerifyError> {
    let mut params = BTreeMap::new();
    params.insert("q".into(), q.to_string());
    params.insert("psi_q".into(), fmt_rational(psi_q));
    let hypothesis = *psi_q <= crate::rational::one_half() && !psi_q.is_negative();
    if !hypothesis {
        return Ok(LemmaReport::new(
            LemmaId::BasicSize,
            params,
            false,
            false,
            None,
            BTreeMap::new(),
        ));
    }
    let y = target.y().clone();
    let ap = target.approximant(q)?;
    params.insert("b".into(), ap.b.to_string());
    let full = SetDescriptor::full(q, psi_q.clone(), y.clone())?;
    let tilde = SetDescriptor::tilde(q, psi_q.clone(), y, ap.clone())?;

    let full_closed = measure_closed_form(&full)?;
    let tilde_closed = match mode {
        EulerProductMode::Standard => measure_closed_form(&tilde)?,
        EulerProductMode::DropApproximantDenominator => {
            rat_u64(4) * psi_q * psi_q * coprime_box_density_ignoring_b(q)
        }
    };
    let full_oracle = measure_oracle(&full, cap)?;
    let tilde_oracle = measure_oracle(&tilde, cap)?;

    let ok_full = full_closed == full_oracle;
    let ok_tilde = tilde_closed == tilde_oracle;
    let mut values = BTreeMap::new();
    values.insert("full".into(), fmt_rational(&full_oracle));
    values.insert("tilde".into(), fmt_rational(&tilde_oracle));
    values.insert("full_closed".into(), fmt_rational(&full_closed));
    values.insert("tilde_closed".into(), fmt_rational(&tilde_closed));
    let witness = if ok_full && ok_tilde {
        None
    } else {
        Some(format!(
            "closed form disagrees with enumeration at q={q} (full ok: {ok_full}, tilde ok: {ok_tilde})"
        ))
    };
    Ok(LemmaReport::new(
        LemmaId::BasicSize,
        params,
        true,
        ok_full && ok_tilde,
        witness,
        values,
    ))
}

/// Exact |A~_q cap A~_r| / (psi(q)^2 psi(r)^2 + psi(q)^2 gcd(q,r)^2 / q^2).
/// A zero denominator forces a zero numerator and the ratio is defined as 0.
pub fn overlap_ratio(
    q: u64,
    r: u64,
    psi: &PsiFunction,
    target: &Target,
    cap: u64,
) -> Result<Rational, VerifyError> {
    if q <= r || r == 0 {
        return Err(VerifyError::BadPair { q, r });
    }
    let psi_q = psi.eval(q);
    let psi_r = psi.eval(r);
    let g = gcd_u64(q, r);
    let sq = &psi_q * &psi_q;
    let sr = &psi_r * &psi_r;
    let denom = &sq * &sr + &sq * rat_u64(g * g) / rat_u64(q * q);
    if denom.is_zero() {
        return Ok(Rational::zero());
    }
    let y = target.y().clone();
    let dq = SetDescriptor::tilde(q, psi_q, y.clone(), target.approximant(q)?)?;
    let dr = SetDescriptor::tilde(r, psi_r, y, target.approximant(r)?)?;
    let num = pair_intersection_measure(&dq, &dr, cap)?;
    Ok(num / denom)
}

/// Large-gcd disjointness, audited in the strengthened proof form:
/// under the hypotheses, the reduced set at q misses the whole full set at r.
pub fn key_disjointness(
    q: u64,
    r: u64,
    psi: &PsiFunction,
    target: &Target,
    cap: u64,
) -> Result<LemmaReport, VerifyError> {
    if q <= r || r == 0 {
        return Err(VerifyError::BadPair { q, r });
    }
    let delta = target.delta().clone();
    let p = u32::try_from(delta.numer()).expect("delta numerator fits u32");
    let s = u32::try_from(delta.denom()).expect("delta denominator fits u32");
    let psi_q = psi.eval(q);
    let psi_r = psi.eval(r);
    let g = gcd_u64(q, r);

    let decay_ok = |v: &Rational, n: u64| -> bool {
        cmp_power(v, s, &rat_u64(n).recip(), p) != Ordering::Greater
    };
    // gcd(q,r) > 4 q^{3/(delta+3)}  <=>  (g/4)^{p+3s} > q^{3s}.
    let gcd_big = cmp_power(&(rat_u64(g) / rat_u64(4)), p + 3 * s, &rat_u64(q), 3 * s)
        == Ordering::Greater;
    let hypothesis = decay_ok(&psi_q, q) && decay_ok(&psi_r, r) && gcd_big;

    let mut params = BTreeMap::new();
    params.insert("q".into(), q.to_string());
    params.insert("r".into(), r.to_string());
    params.insert("delta".into(), fmt_rational(&delta));
    params.insert("gcd".into(), g.to_string());
    let mut values = BTreeMap::new();
    values.insert("psi_q".into(), fmt_rational(&psi_q));
    values.insert("psi_r".into(), fmt_rational(&psi_r));

    if !hypothesis {
        return Ok(LemmaReport::new(
            LemmaId::Key,
            params,
            false,
            false,
            None,
            values,
        ));
    }
    let y = target.y().clone();
    let dq = SetDescriptor::tilde(q, psi_q, y.clone(), target.approximant(q)?)?;
    let dr = SetDescriptor::full(r, psi_r, y)?;
    let inter = pair_intersection_measure(&dq, &dr, cap)?;
    values.insert("intersection".into(), fmt_rational(&inter));
    let disjoint = inter.is_zero();
    let witness = if disjoint {
        None
    } else {
        Some(format!(
            "nonzero intersection {} at q={q}, r={r}",
            fmt_rational(&inter)
        ))
    };
    Ok(LemmaReport::new(
        LemmaId::Key,
        params,
        true,
        disjoint,
        witness,
        values,
    ))
}

/// Exact check of sum_{r=1}^{q} gcd(q,r)^2 / q^2 = sum_{e|q} phi(e) / e^2.
pub fn divisor_identity(q: u64) -> LemmaReport {
    let mut gcd_sq_sum: u128 = 0;
    for r in 1..=q {
        let g = gcd_u64(q, r) as u128;
        gcd_sq_sum += g * g;
    }
    let lhs = Rational::new(BigInt::from(gcd_sq_sum), BigInt::from(q) * BigInt::from(q));
    let mut rhs = Rational::zero();
    for e in divisors(q) {
        rhs += rat_u64(phi(e)) / rat_u64(e * e);
    }
    let ok = lhs == rhs;
    let mut params = BTreeMap::new();
    params.insert("q".into(), q.to_string());
    let mut values = BTreeMap::new();
    values.insert("lhs".into(), fmt_rational(&lhs));
    values.insert("rhs".into(), fmt_rational(&rhs));
    let witness = (!ok).then(|| format!("gcd sum and divisor sum differ at q={q}"));
    LemmaReport::new(LemmaId::DivisorIdentity, params, true, ok, witness, values)
}

/// The tail-bound chain: L = sum over divisors d <= 4 q^{3/(delta+3)} of
/// (d^2/q^2) phi(q/d) equals M = sum over divisors e >= q^{delta/(delta+3)}/4
/// of phi(e)/e^2, which is at most U = sum of 1/e over the same e, which is
/// strictly below 4 tau(q) / q^{delta/(delta+3)}.
pub fn restricted_divisor_bound(q: u64, delta: &Rational) -> LemmaReport {
    let p = u32::try_from(delta.numer()).expect("delta numerator fits u32");
    let s = u32::try_from(delta.denom()).expect("delta denominator fits u32");
    let exp = p + 3 * s;
    let divs = divisors(q);

    // d <= 4 q^{3/(delta+3)}  <=>  (d/4)^{p+3s} <= q^{3s}.
    let mut small_d = Rational::zero();
    for &d in &divs {
        if cmp_power(&(rat_u64(d) / rat_u64(4)), exp, &rat_u64(q), 3 * s) != Ordering::Greater {
            small_d += rat_u64(d * d) / rat_u64(q * q) * rat_u64(phi(q / d));
        }
    }
    // e >= q^{delta/(delta+3)} / 4  <=>  (4e)^{p+3s} >= q^{p}.
    let mut large_e_phi = Rational::zero();
    let mut large_e_recip = Rational::zero();
    for &e in &divs {
        if cmp_power(&rat_u64(4 * e), exp, &rat_u64(q), p) != Ordering::Less {
            large_e_phi += rat_u64(phi(e)) / rat_u64(e * e);
            large_e_recip += rat_u64(e).recip();
        }
    }
    // U < 4 tau(q) / q^{delta/(delta+3)}  <=>  U^{p+3s} < (4 tau)^{p+3s} / q^p.
    let tau_q = tau(q);
    let rhs = Rational::new(
        BigInt::from(4 * tau_q).pow(exp),
        BigInt::from(q).pow(p),
    );
    let substitution_ok = small_d == large_e_phi;
    let monotone_ok = large_e_phi <= large_e_recip;
    let tail_ok = cmp_power(&large_e_recip, exp, &rhs, 1) == Ordering::Less;
    let ok = substitution_ok && monotone_ok && tail_ok;

    let mut params = BTreeMap::new();
    params.insert("q".into(), q.to_string());
    params.insert("delta".into(), fmt_rational(delta));
    let mut values = BTreeMap::new();
    values.insert("small_divisor_sum".into(), fmt_rational(&small_d));
    values.insert("large_divisor_phi_sum".into(), fmt_rational(&large_e_phi));
    values.insert("large_divisor_recip_sum".into(), fmt_rational(&large_e_recip));
    values.insert("tau".into(), tau_q.to_string());
    let witness = (!ok).then(|| {
        format!(
            "chain broken at q={q}: substitution {substitution_ok}, monotone {monotone_ok}, tail {tail_ok}"
        )
    });
    LemmaReport::new(LemmaId::DivisorBound, params, true, ok, witness, values)
}

/// The Chung-Erdos quantity R(Q) = (sum_q |A~_q|)^2 / sum_{q,r} |A~_q cap A~_r|
/// over q, r = 1..Q, computed exactly (closed-form diagonal, enumerated
/// off-diagonal). Cauchy-Schwarz forces R(Q) <= 1.
pub fn quasi_independence_ratio(
    qmax: u64,
    psi: &PsiFunction,
    target: &Target,
    cap: u64,
) -> Result<Rational, VerifyError> {
    let y = target.y().clone();
    let mut descriptors: Vec<Option<SetDescriptor>> = Vec::with_capacity(qmax as usize);
    let mut total = Rational::zero();
    for q in 1..=qmax {
        let v = psi.eval(q);
        if v.is_zero() {
            descriptors.push(None);
            continue;
        }
        let d = SetDescriptor::tilde(q, v, y.clone(), target.approximant(q)?)?;
        total += measure_closed_form(&d)?;
        descriptors.push(Some(d));
    }
    if total.is_zero() {
        return Err(VerifyError::AllZeroPsi);
    }
    let mut pair_sum = Rational::zero();
    for (qi, dq) in descriptors.iter().enumerate() {
        let Some(dq) = dq else { continue };
        pair_sum += measure_closed_form(dq)?;
        for dr in descriptors.iter().take(qi).flatten() {
            pair_sum += rat_u64(2) * pair_intersection_measure(dq, dr, cap)?;
        }
    }
    Ok(&total * &total / pair_sum)
}
