//! Finite-degree experiments: Fujita approximation by `B^(p)`, truncation tails of sub-series, and
//! domination under enlarged weights.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use super::trace::log_box_count;
use super::{effective_subseries, generated_subalgebra, normalizer, Exponent, GradedSeries};
use crate::audit::{AuditEntry, AuditReport};
use crate::error::{Error, Result};
use crate::measure::{DiracMixture, PiecewiseLinear};
use crate::real::{format_rational, rational, Rational, Real};

#[derive(Clone, Debug, PartialEq)]
pub struct FujitaRow {
    pub p: usize,
    /// Largest multiple of `p` not exceeding the top sampled degree.
    pub degree: usize,
    pub vol_hat: f64,
    /// Running maximum over the rows so far.
    pub envelope: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FujitaReport {
    pub rows: Vec<FujitaRow>,
    /// `vol̂(B^[0])` estimate at the top sampled degree.
    pub reference: f64,
    pub reference_degree: usize,
    pub sup: f64,
}

fn h0_normalized(b: &GradedSeries, n: usize) -> Result<f64> {
    let mut h = 0.0;
    for c in b.weights(n)? {
        h += log_box_count(&c)?;
    }
    Ok(h / normalizer(n, b.arithmetic_dim()))
}

/// `vol̂(B^(p))` against `vol̂(B^[0])`, each estimated at one degree in the original grading (monomial models).
pub fn fujita_experiment(b: &GradedSeries, p_list: &[usize], degrees: &[usize]) -> Result<FujitaReport> {
    let top = *degrees
        .iter()
        .max()
        .ok_or_else(|| Error::InvalidParameter("no degrees given".into()))?;
    if b.as_monomial().is_none() {
        return Err(Error::Unsupported("Fujita experiment on an explicit series".into()));
    }
    let eff = effective_subseries(b, &Rational::zero())?;
    let reference = h0_normalized(&eff, top)?;
    let vols: Vec<(usize, usize, f64)> = p_list
        .par_iter()
        .map(|&p| {
            if p == 0 || p > top {
                return Err(Error::InvalidParameter(format!("p = {p} outside 1..={top}")));
            }
            let sub = generated_subalgebra(b, p)?;
            let m = top - top % p;
            Ok((p, m, h0_normalized(&sub, m)?))
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(vols.len());
    let mut env = f64::NEG_INFINITY;
    for (p, degree, vol_hat) in vols {
        env = env.max(vol_hat);
        rows.push(FujitaRow {
            p,
            degree,
            vol_hat,
            envelope: env,
        });
    }
    Ok(FujitaReport {
        rows,
        reference,
        reference_degree: top,
        sup: env,
    })
}

/// `#{a ∈ S_n | w(a,n) ≥ nx} ≤ #{a ∈ B_n | w(a,n) ≥ nx}`, one exact line per degree and `x`.
pub fn truncation_comparison(b: &GradedSeries, s: &GradedSeries, xs: &[Rational], degrees: &[usize]) -> Result<AuditReport> {
    let (mb, ms) = match (b.as_monomial(), s.as_monomial()) {
        (Some(mb), Some(ms)) => (mb, ms),
        _ => return Err(Error::Unsupported("truncation comparison on explicit series".into())),
    };
    if mb.weight != ms.weight {
        return Err(Error::InvalidParameter("S is not a sub-series of B: different weights".into()));
    }
    let per_degree: Vec<Vec<AuditEntry>> = degrees
        .par_iter()
        .map(|&n| {
            let eb = b.exponents(n)?;
            let es = s.exponents(n)?;
            let sb: BTreeSet<&Exponent> = eb.iter().collect();
            if es.iter().any(|a| !sb.contains(a)) {
                return Err(Error::InvalidParameter(format!("S is not a sub-series of B in degree {n}")));
            }
            let wb: Vec<Rational> = eb.iter().map(|a| mb.weight.eval(a, n)).collect();
            let ws: Vec<Rational> = es.iter().map(|a| mb.weight.eval(a, n)).collect();
            let nn = rational(n as i64, 1);
            Ok(xs
                .iter()
                .map(|x| {
                    let t = x * &nn;
                    let cb = wb.iter().filter(|w| **w >= t).count() as i64;
                    let cs = ws.iter().filter(|w| **w >= t).count() as i64;
                    AuditEntry::le(
                        format!("truncation[n={n},x={}]", format_rational(x)),
                        &Real::from_int(cs),
                        &Real::from_int(cb),
                    )
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut report = AuditReport::new();
    for e in per_degree.into_iter().flatten() {
        report.push(e);
    }
    Ok(report)
}

/// Enlarged weights `c_a + δ_a` on `B_m`, listed in basis order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightPerturbation {
    pub degree: usize,
    pub delta: Vec<Rational>,
}

/// For each perturbation: if `F_t B_m ⊆ F^{(m)}_t B_m` for all `t` (for coordinate filtrations: `δ ≥ 0`),
/// check `∫φ dT_{1/m}ν^{(m)} ≥ ∫φ dT_{1/m}ν` exactly; otherwise report the failed hypothesis.
pub fn metric_comparison_experiment(
    b: &GradedSeries,
    perturbations: &[WeightPerturbation],
    phi: &PiecewiseLinear,
) -> Result<AuditReport> {
    if b.as_monomial().is_none() {
        return Err(Error::Unsupported("metric comparison on an explicit series".into()));
    }
    let entries: Vec<AuditEntry> = perturbations
        .par_iter()
        .enumerate()
        .map(|(k, pert)| {
            let m = pert.degree;
            let id = format!("metric-comparison[{k},m={m}]");
            if m == 0 {
                return Err(Error::InvalidParameter("perturbation degree must be positive".into()));
            }
            let c = b.weights(m)?;
            if c.len() != pert.delta.len() {
                return Err(Error::DimensionMismatch {
                    expected: c.len(),
                    got: pert.delta.len(),
                });
            }
            if let Some(j) = pert.delta.iter().position(Signed::is_negative) {
                return Ok(AuditEntry::hypothesis_failed(
                    id,
                    format!("weight of basis element {j} decreases: F_t is not contained in the new filtration"),
                ));
            }
            let inv = rational(1, m as i64);
            let nu = DiracMixture::uniform(c.iter().map(|x| Real::from_rational(x * &inv)).collect())?;
            let nu_m =
                DiracMixture::uniform(c.iter().zip(&pert.delta).map(|(x, d)| Real::from_rational((x + d) * &inv)).collect())?;
            Ok(AuditEntry::ge(id, &nu_m.integrate(phi)?, &nu.integrate(phi)?))
        })
        .collect::<Result<_>>()?;
    let mut report = AuditReport::new();
    for e in entries {
        report.push(e);
    }
    Ok(report)
}
