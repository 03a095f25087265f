//! Per-degree records `T_{1/n} ν_{(B_n, F^M)}`, ranks and `ĥ⁰`, and the volume estimators built on them.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::{normalizer, GradedSeries, SeriesModel};
use crate::audit::AuditEntry;
use crate::error::{Error, Result};
use crate::lattice::{h0, successive_minima, DEFAULT_BUDGET};
use crate::measure::{kolmogorov_distance, DiracMixture, PiecewiseLinear, Reference};
use crate::real::{rational, Rational, Real};

#[derive(Clone, Debug)]
pub struct DegreeRecord {
    pub n: usize,
    pub rank: usize,
    pub h0: f64,
    pub h0_normalized: f64,
    pub lambda_max_over_n: Option<f64>,
    /// `T_{1/n} ν_{(B_n, F^M)}`; zero measure when `B_n = 0`.
    pub measure: DiracMixture,
    pub cdf_distance: Option<f64>,
    /// Set when this degree could not be computed; the other fields are then placeholders.
    pub error: Option<Error>,
}

#[derive(Clone, Debug)]
pub struct AsymptoticTrace {
    pub degrees: Vec<usize>,
    pub records: Vec<DegreeRecord>,
}

const CSV_HEADER: &str = "n,rank,h0,h0_normalized,lambda_max_over_n,cdf_distance_to_reference";

impl AsymptoticTrace {
    /// Last successfully computed record.
    pub fn last(&self) -> Option<&DegreeRecord> {
        self.records.iter().rev().find(|r| r.error.is_none())
    }

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            if r.error.is_some() {
                out.push_str(&format!("{},,,,,\n", r.n));
                continue;
            }
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.n,
                r.rank,
                r.h0,
                r.h0_normalized,
                opt(r.lambda_max_over_n),
                opt(r.cdf_distance)
            ));
        }
        out
    }
}

/// `ln(2⌊e^w⌋ + 1)`. Floating point away from integer crossings of `e^w`, certified near them.
pub(crate) fn log_box_count(w: &Rational) -> Result<f64> {
    let x = w.to_f64().unwrap_or(f64::NAN);
    if x < 0.0 {
        return Ok(0.0);
    }
    if x > 40.0 {
        // 2⌊e^x⌋+1 = 2e^x (1 + O(e^{-x}))
        return Ok(x + std::f64::consts::LN_2);
    }
    let e = x.exp();
    let frac = e - e.floor();
    let floor = if !(1e-9..=1.0 - 1e-9).contains(&frac) {
        let f: BigUint = Real::from_rational(w.clone()).floor_exp()?;
        f.to_f64().unwrap_or(f64::INFINITY)
    } else {
        e.floor()
    };
    Ok((2.0 * floor + 1.0).ln())
}

/// Minimum-filtration levels of `B_n` and `ĥ⁰`, closed form for monomial models.
fn levels_and_h0(b: &GradedSeries, n: usize) -> Result<(Vec<Real>, f64)> {
    match b.model() {
        SeriesModel::Monomial(_) => {
            let w = b.weights(n)?;
            let mut h = 0.0;
            for c in &w {
                h += log_box_count(c)?;
            }
            Ok((w.into_iter().map(Real::from_rational).collect(), h))
        }
        SeriesModel::Explicit(_) => {
            if b.rank(n)? == 0 {
                return Ok((Vec::new(), 0.0));
            }
            let l = b.degree_component(n)?;
            let m = successive_minima(&l, DEFAULT_BUDGET)?;
            Ok((m.levels, h0(&l, DEFAULT_BUDGET)?.to_f64()))
        }
    }
}

fn record(b: &GradedSeries, n: usize, reference: Option<&Reference>) -> Result<DegreeRecord> {
    let (levels, h) = levels_and_h0(b, n)?;
    let rank = levels.len();
    let inv = rational(1, n as i64);
    let lambda_max_over_n = levels.iter().max().map(|m| m.scale(&inv).to_f64());
    let measure = DiracMixture::uniform(levels)?.rescale(&inv)?;
    let cdf_distance = match reference {
        Some(r) if rank > 0 => Some(kolmogorov_distance(&measure, r)?),
        _ => None,
    };
    Ok(DegreeRecord {
        n,
        rank,
        h0: h,
        h0_normalized: h / normalizer(n, b.arithmetic_dim()),
        lambda_max_over_n,
        measure,
        cdf_distance,
        error: None,
    })
}

fn check_degrees(degrees: &[usize]) -> Result<()> {
    if degrees.is_empty() {
        return Err(Error::InvalidParameter("no degrees given".into()));
    }
    if degrees[0] == 0 {
        return Err(Error::InvalidParameter("degrees must be positive".into()));
    }
    if degrees.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("degrees must be strictly increasing".into()));
    }
    Ok(())
}

/// Degrees are evaluated concurrently; a failure at one degree is recorded there and does not abort the others.
pub fn asymptotic_trace(b: &GradedSeries, degrees: &[usize], reference: Option<&Reference>) -> Result<AsymptoticTrace> {
    check_degrees(degrees)?;
    let records = degrees
        .par_iter()
        .map(|&n| {
            record(b, n, reference).unwrap_or_else(|e| DegreeRecord {
                n,
                rank: 0,
                h0: 0.0,
                h0_normalized: 0.0,
                lambda_max_over_n: None,
                measure: DiracMixture::zero(),
                cdf_distance: None,
                error: Some(e),
            })
        })
        .collect();
    Ok(AsymptoticTrace {
        degrees: degrees.to_vec(),
        records,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct VolumeEstimate {
    /// `d(B)`: the rounded log-log slope of the ranks.
    pub dim: usize,
    pub fitted_slope: f64,
    /// `(n, rank B_n / (n^d / d!))` over degrees with `B_n ≠ 0`.
    pub sequence: Vec<(usize, f64)>,
    pub estimate: f64,
    /// The slope is further than 1/4 from an integer.
    pub flagged: bool,
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Ranks normalized in the original grading; degrees where `B_n = 0` are skipped.
pub fn volume_estimate(b: &GradedSeries, degrees: &[usize]) -> Result<VolumeEstimate> {
    check_degrees(degrees)?;
    let ranks: Vec<(usize, usize)> = degrees
        .par_iter()
        .map(|&n| b.rank(n).map(|r| (n, r)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|&(_, r)| r > 0)
        .collect();
    if ranks.len() < 2 {
        return Err(Error::Degenerate("fewer than two non-zero components".into()));
    }
    let top = &ranks[ranks.len() / 2..];
    let top = if top.len() < 2 { &ranks[ranks.len() - 2..] } else { top };
    let pts: Vec<(f64, f64)> = top.iter().map(|&(n, r)| ((n as f64).ln(), (r as f64).ln())).collect();
    let slope = least_squares_slope(&pts);
    let dim = slope.round().max(0.0) as usize;
    let flagged = (slope - slope.round()).abs() > 0.25;
    if let Some(m) = b.as_monomial() {
        let expected = m.weight.proj_dim();
        if dim != expected && !flagged {
            return Err(Error::InconsistentFlag(format!(
                "rank growth of degree {dim} for a model of dimension {expected}"
            )));
        }
    }
    let sequence: Vec<(usize, f64)> = ranks.iter().map(|&(n, r)| (n, r as f64 / normalizer(n, dim))).collect();
    Ok(VolumeEstimate {
        dim,
        fitted_slope: slope,
        estimate: sequence.last().expect("non-empty").1,
        sequence,
        flagged,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArithmeticVolume {
    /// `(n, ĥ⁰(B_n) / (n^d / d!))`, `d` the arithmetic dimension.
    pub sequence: Vec<(usize, f64)>,
    pub estimate: f64,
}

pub fn arithmetic_volume_estimate(b: &GradedSeries, degrees: &[usize]) -> Result<ArithmeticVolume> {
    let trace = asymptotic_trace(b, degrees, None)?;
    let mut sequence = Vec::with_capacity(trace.records.len());
    for r in &trace.records {
        if let Some(e) = &r.error {
            return Err(e.clone());
        }
        sequence.push((r.n, r.h0_normalized));
    }
    Ok(ArithmeticVolume {
        estimate: sequence.last().expect("non-empty").1,
        sequence,
    })
}

/// `∫ max{x,0} dν_n` against `vol̂ / (δ d vol)` at the largest degree; the entry compares their ratio with 1.
pub fn volume_identity_check(b: &GradedSeries, degrees: &[usize], tol: f64) -> Result<AuditEntry> {
    let vol = volume_estimate(b, degrees)?;
    if vol.estimate <= 0.0 {
        return Err(Error::Degenerate("vol(B) = 0".into()));
    }
    let n = vol.sequence.last().expect("non-empty").0;
    let rec = record(b, n, None)?;
    let lhs = rec.measure.integrate_f64(&PiecewiseLinear::positive_part())?;
    let delta = b.base().delta as f64;
    let rhs = rec.h0_normalized / (delta * b.arithmetic_dim() as f64 * vol.estimate);
    if rhs == 0.0 {
        return Ok(AuditEntry::within(format!("volume-identity[n={n}]"), lhs, rhs, tol));
    }
    Ok(AuditEntry::within(format!("volume-identity[n={n}]"), lhs / rhs, 1.0, tol))
}
