//! Graded linear series: one normed lattice per degree, with multiplication.
//!
//! Two realizations. Monomial models on `ℙ^N` select exponent vectors and put
//! the diagonal max norm `c_a = w(a, n)` on `B_n`; multiplication is exponent
//! addition, so `λ(m m') = λ(m) + λ(m')` for monomials. Explicit series store
//! a lattice per degree and the structure constants of the multiplication on
//! basis pairs.

pub mod experiments;
pub mod selection;
pub mod trace;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::audit::{AuditEntry, AuditReport};
use crate::error::{Error, Result};
use crate::intlat::{integral_rows, saturate, to_qmat};
use crate::lattice::{minimum_filtration, BaseField, Norm, NormedLattice, DEFAULT_BUDGET};
use crate::linalg::QMat;
use crate::real::{rational, Rational, Real};

pub use experiments::{
    fujita_experiment, metric_comparison_experiment, truncation_comparison, FujitaReport, FujitaRow, WeightPerturbation,
};
pub use selection::{Exponent, Selection, Weight};
pub use trace::{
    arithmetic_volume_estimate, asymptotic_trace, volume_estimate, volume_identity_check, ArithmeticVolume, AsymptoticTrace,
    DegreeRecord, VolumeEstimate,
};

/// `mult[(n, m)][i][j]` is the product of basis vectors `e_i ∈ B_n`, `e_j ∈ B_m` in the coordinates of `B_{n+m}`.
pub type MultTable = BTreeMap<(usize, usize), Vec<Vec<Vec<Rational>>>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialModel {
    pub weight: Weight,
    pub selection: Selection,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitSeries {
    /// Non-zero components.
    pub lattices: BTreeMap<usize, NormedLattice>,
    /// Degrees known to have `B_n = 0`.
    pub zero: BTreeSet<usize>,
    pub mult: MultTable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeriesModel {
    Monomial(MonomialModel),
    Explicit(ExplicitSeries),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSeries {
    model: SeriesModel,
    arithmetic_dim: usize,
    base: BaseField,
    horizon: Option<usize>,
}

impl GradedSeries {
    pub fn monomial(weight: Weight, selection: Selection) -> Result<Self> {
        if weight.w_lin.len() < 2 {
            return Err(Error::InvalidParameter("monomial models need at least two variables".into()));
        }
        let d = weight.w_lin.len();
        Ok(GradedSeries {
            model: SeriesModel::Monomial(MonomialModel { weight, selection }),
            arithmetic_dim: d,
            base: BaseField::rationals(),
            horizon: None,
        })
    }

    /// Validates shapes and associativity on every basis triple the table covers.
    pub fn explicit(lattices: BTreeMap<usize, NormedLattice>, mult: MultTable, arithmetic_dim: usize) -> Result<Self> {
        if arithmetic_dim == 0 {
            return Err(Error::InvalidParameter("arithmetic dimension must be positive".into()));
        }
        let ex = ExplicitSeries {
            lattices,
            zero: BTreeSet::new(),
            mult,
        };
        ex.validate()?;
        let horizon = ex.lattices.keys().next_back().copied();
        Ok(GradedSeries {
            model: SeriesModel::Explicit(ex),
            arithmetic_dim,
            base: BaseField::rationals(),
            horizon,
        })
    }

    pub fn with_horizon(mut self, horizon: usize) -> Self {
        self.horizon = Some(horizon);
        self
    }

    pub fn with_base(mut self, base: BaseField) -> Self {
        self.base = base;
        self
    }

    pub fn model(&self) -> &SeriesModel {
        &self.model
    }

    pub fn arithmetic_dim(&self) -> usize {
        self.arithmetic_dim
    }

    pub fn base(&self) -> &BaseField {
        &self.base
    }

    pub fn horizon(&self) -> Option<usize> {
        self.horizon
    }

    pub fn as_monomial(&self) -> Option<&MonomialModel> {
        match &self.model {
            SeriesModel::Monomial(m) => Some(m),
            SeriesModel::Explicit(_) => None,
        }
    }

    fn check_degree(&self, n: usize) -> Result<()> {
        match self.horizon {
            Some(h) if n > h => Err(Error::InvalidParameter(format!("degree {n} beyond the horizon {h}"))),
            _ => Ok(()),
        }
    }

    /// Selected exponents of `B_n` (monomial models).
    pub fn exponents(&self, n: usize) -> Result<Vec<Exponent>> {
        self.check_degree(n)?;
        match &self.model {
            SeriesModel::Monomial(m) => m.selection.exponents(&m.weight, n),
            SeriesModel::Explicit(_) => Err(Error::Unsupported("exponents of an explicit series".into())),
        }
    }

    /// `c_a = w(a, n)` in basis order (monomial models).
    pub fn weights(&self, n: usize) -> Result<Vec<Rational>> {
        let m = self
            .as_monomial()
            .ok_or_else(|| Error::Unsupported("weights of an explicit series".into()))?;
        Ok(self.exponents(n)?.iter().map(|a| m.weight.eval(a, n)).collect())
    }

    pub fn rank(&self, n: usize) -> Result<usize> {
        self.check_degree(n)?;
        match &self.model {
            SeriesModel::Monomial(_) => Ok(self.exponents(n)?.len()),
            SeriesModel::Explicit(ex) => ex.rank(n),
        }
    }

    /// Rank-0 components are reported as [`Error::Degenerate`].
    pub fn degree_component(&self, n: usize) -> Result<NormedLattice> {
        self.check_degree(n)?;
        let l = match &self.model {
            SeriesModel::Monomial(_) => {
                let c = self.weights(n)?;
                if c.is_empty() {
                    return Err(Error::Degenerate(format!("B_{n} = 0")));
                }
                NormedLattice::diagonal_max(c.into_iter().map(Real::from_rational).collect())?
            }
            SeriesModel::Explicit(ex) => ex.component(n)?.clone(),
        };
        Ok(l.with_base(self.base.clone()))
    }

    /// Explicit form of a monomial model on the given degrees (products kept when both factors and the sum are listed).
    pub fn to_explicit(&self, degrees: &[usize]) -> Result<GradedSeries> {
        let m = match &self.model {
            SeriesModel::Explicit(_) => return Ok(self.clone()),
            SeriesModel::Monomial(m) => m,
        };
        let degrees: BTreeSet<usize> = degrees.iter().copied().collect();
        let mut exps: BTreeMap<usize, Vec<Exponent>> = BTreeMap::new();
        for &n in &degrees {
            exps.insert(n, self.exponents(n)?);
        }
        let mut lattices = BTreeMap::new();
        let mut zero = BTreeSet::new();
        for (&n, e) in &exps {
            if e.is_empty() {
                zero.insert(n);
            } else {
                let c = e.iter().map(|a| Real::from_rational(m.weight.eval(a, n))).collect();
                lattices.insert(n, NormedLattice::diagonal_max(c)?.with_base(self.base.clone()));
            }
        }
        let mut mult = MultTable::new();
        for (&n, en) in &exps {
            for (&k, ek) in &exps {
                let Some(es) = exps.get(&(n + k)) else { continue };
                if en.is_empty() || ek.is_empty() {
                    continue;
                }
                let index: HashMap<&Exponent, usize> = es.iter().enumerate().map(|(i, a)| (a, i)).collect();
                let mut table = Vec::with_capacity(en.len());
                for a in en {
                    let mut row = Vec::with_capacity(ek.len());
                    for b in ek {
                        let s: Exponent = a.iter().zip(b).map(|(x, y)| x + y).collect();
                        let i = *index
                            .get(&s)
                            .ok_or_else(|| Error::InconsistentFlag(format!("selection not closed under products in degree {}", n + k)))?;
                        let mut v = vec![Rational::zero(); es.len()];
                        v[i] = Rational::one();
                        row.push(v);
                    }
                    table.push(row);
                }
                mult.insert((n, k), table);
            }
        }
        Ok(GradedSeries {
            model: SeriesModel::Explicit(ExplicitSeries { lattices, zero, mult }),
            arithmetic_dim: self.arithmetic_dim,
            base: self.base.clone(),
            horizon: degrees.iter().next_back().copied(),
        })
    }
}

impl ExplicitSeries {
    fn rank(&self, n: usize) -> Result<usize> {
        if self.zero.contains(&n) {
            return Ok(0);
        }
        Ok(self.component(n)?.rank())
    }

    fn component(&self, n: usize) -> Result<&NormedLattice> {
        self.lattices.get(&n).ok_or_else(|| {
            if self.zero.contains(&n) {
                Error::Degenerate(format!("B_{n} = 0"))
            } else {
                Error::InvalidParameter(format!("degree {n} is not stored"))
            }
        })
    }

    fn product(&self, n: usize, x: &[Rational], m: usize, y: &[Rational]) -> Result<Vec<Rational>> {
        let table = self
            .mult
            .get(&(n, m))
            .ok_or_else(|| Error::InvalidParameter(format!("no multiplication {n} × {m}")))?;
        let r = self.rank(n + m)?;
        let mut out = vec![Rational::zero(); r];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let c = xi * yj;
                for (o, t) in out.iter_mut().zip(&table[i][j]) {
                    if !t.is_zero() {
                        *o += &c * t;
                    }
                }
            }
        }
        Ok(out)
    }

    fn validate(&self) -> Result<()> {
        for (&(n, m), table) in &self.mult {
            let (rn, rm, rs) = (self.rank(n)?, self.rank(m)?, self.rank(n + m)?);
            if table.len() != rn || table.iter().any(|row| row.len() != rm || row.iter().any(|v| v.len() != rs)) {
                return Err(Error::DimensionMismatch { expected: rs, got: table.len() });
            }
        }
        for &(n, m) in self.mult.keys() {
            for &(nm, k) in self.mult.keys() {
                if nm != n + m || !self.mult.contains_key(&(m, k)) || !self.mult.contains_key(&(n, m + k)) {
                    continue;
                }
                let unit = |d: usize, i: usize| -> Result<Vec<Rational>> {
                    let mut v = vec![Rational::zero(); self.rank(d)?];
                    v[i] = Rational::one();
                    Ok(v)
                };
                for i in 0..self.rank(n)? {
                    for j in 0..self.rank(m)? {
                        for l in 0..self.rank(k)? {
                            let (x, y, z) = (unit(n, i)?, unit(m, j)?, unit(k, l)?);
                            let left = self.product(n + m, &self.product(n, &x, m, &y)?, k, &z)?;
                            let right = self.product(n, &x, m + k, &self.product(m, &y, k, &z)?)?;
                            if left != right {
                                return Err(Error::InvalidParameter(format!(
                                    "multiplication is not associative in degrees ({n}, {m}, {k})"
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Sub-series on the given spans (columns, in each degree's coordinates); other degrees become zero.
    fn restrict(&self, spans: &BTreeMap<usize, QMat>) -> Result<ExplicitSeries> {
        let mut lattices = BTreeMap::new();
        let mut bases: BTreeMap<usize, QMat> = BTreeMap::new();
        let mut zero: BTreeSet<usize> = self.lattices.keys().chain(&self.zero).copied().collect();
        for (&n, span) in spans {
            if span.ncols() == 0 {
                continue;
            }
            let l = self.component(n)?;
            let r = l.rank();
            let rows = saturate(&integral_rows(span), r);
            let b = to_qmat(&rows, r);
            let norm = match l.norm() {
                Norm::Euclidean { gram } => Norm::Euclidean {
                    gram: b.transpose().mul(&gram.mul(&b)?)?,
                },
                Norm::PolyhedralMax { functionals } => Norm::PolyhedralMax {
                    functionals: functionals.mul(&b)?,
                },
                Norm::DiagonalMax { c } => {
                    let mut cs = Vec::with_capacity(rows.len());
                    for row in &rows {
                        let nz: Vec<usize> = (0..r).filter(|&j| !row[j].is_zero()).collect();
                        if nz.len() != 1 || !row[nz[0]].abs().is_one() {
                            return Err(Error::Unsupported("non-coordinate sublattice of a diagonal norm".into()));
                        }
                        cs.push(c[nz[0]].clone());
                    }
                    Norm::DiagonalMax { c: cs }
                }
            };
            lattices.insert(n, NormedLattice::new(norm, l.base().clone())?);
            bases.insert(n, b);
            zero.remove(&n);
        }
        let mut mult = MultTable::new();
        for &(n, m) in self.mult.keys() {
            let (Some(bn), Some(bm)) = (bases.get(&n), bases.get(&m)) else { continue };
            let Some(bs) = bases.get(&(n + m)) else {
                if zero.contains(&(n + m)) {
                    return Err(Error::Degenerate(format!("products of degrees {n} and {m} leave the sub-series")));
                }
                continue;
            };
            let mut table = Vec::with_capacity(bn.ncols());
            for x in bn.cols() {
                let mut row = Vec::with_capacity(bm.ncols());
                for y in bm.cols() {
                    let p = self.product(n, &x, m, &y)?;
                    let coords = bs
                        .solve(&p)
                        .map_err(|_| Error::Degenerate(format!("products of degrees {n} and {m} leave the sub-series")))?;
                    row.push(coords);
                }
                table.push(row);
            }
            mult.insert((n, m), table);
        }
        Ok(ExplicitSeries { lattices, zero, mult })
    }
}

pub fn degree_component(b: &GradedSeries, n: usize) -> Result<NormedLattice> {
    b.degree_component(n)
}

/// `rank Im(S^n B_p → B_{np}) / rank B_{np}`.
pub fn approximation_ratio(b: &GradedSeries, p: usize, n: usize) -> Result<Rational> {
    if p == 0 || n == 0 {
        return Err(Error::InvalidParameter("p and n must be positive".into()));
    }
    let denom = b.rank(n * p)?;
    if denom == 0 {
        return Err(Error::Degenerate(format!("B_{} = 0", n * p)));
    }
    if b.rank(p)? == 0 {
        return Err(Error::Degenerate(format!("B_{p} = 0")));
    }
    let image = match &b.model {
        SeriesModel::Monomial(m) => {
            let gen = b.exponents(p)?;
            let img = selection::sumset(&gen, n, m.weight.w_lin.len());
            let target: BTreeSet<Exponent> = b.exponents(n * p)?.into_iter().collect();
            if img.iter().any(|a| !target.contains(a)) {
                return Err(Error::InconsistentFlag("selection is not closed under products".into()));
            }
            img.len()
        }
        SeriesModel::Explicit(ex) => product_span(ex, p, n)?.ncols(),
    };
    Ok(rational(image as i64, denom as i64))
}

/// Column basis (in `B_{np}` coordinates) of the span of `n`-fold products of `B_p`.
fn product_span(ex: &ExplicitSeries, p: usize, n: usize) -> Result<QMat> {
    let mut span = QMat::identity(ex.rank(p)?);
    for k in 2..=n {
        let r = ex.rank(k * p)?;
        let mut cols = Vec::new();
        for v in span.cols() {
            for j in 0..ex.rank(p)? {
                let mut e = vec![Rational::zero(); ex.rank(p)?];
                e[j] = Rational::one();
                cols.push(ex.product((k - 1) * p, &v, p, &e)?);
            }
        }
        span = if cols.is_empty() { QMat::zeros(r, 0) } else { QMat::from_cols(r, &cols)?.column_basis() };
    }
    Ok(span)
}

/// `rank B^(p)_{np} / rank B_{np}`.
pub fn generated_rank_ratio(b: &GradedSeries, p: usize, n: usize) -> Result<Rational> {
    let sub = generated_subalgebra(b, p)?;
    let denom = b.rank(n * p)?;
    if denom == 0 {
        return Err(Error::Degenerate(format!("B_{} = 0", n * p)));
    }
    Ok(rational(sub.rank(n * p)? as i64, denom as i64))
}

/// `B^[λ]`: in degree `n`, the span of elements of norm `≤ e^{-λn}`.
pub fn effective_subseries(b: &GradedSeries, lambda: &Rational) -> Result<GradedSeries> {
    let model = match &b.model {
        SeriesModel::Monomial(m) => SeriesModel::Monomial(MonomialModel {
            weight: m.weight.clone(),
            selection: Selection::at_least(lambda.clone(), m.selection.clone()),
        }),
        SeriesModel::Explicit(ex) => {
            let mut spans = BTreeMap::new();
            for (&n, l) in &ex.lattices {
                if n == 0 {
                    spans.insert(n, QMat::identity(l.rank()));
                    continue;
                }
                let level = Real::from_rational(lambda * Rational::from_integer(n.into()));
                spans.insert(n, minimum_filtration(l, DEFAULT_BUDGET)?.member_at(&level));
            }
            SeriesModel::Explicit(ex.restrict(&spans)?)
        }
    };
    Ok(GradedSeries { model, ..b.clone() })
}

/// `B^(p)`: the subalgebra generated by `B^[0]_p`, non-zero only in degrees divisible by `p`.
pub fn generated_subalgebra(b: &GradedSeries, p: usize) -> Result<GradedSeries> {
    if p == 0 {
        return Err(Error::InvalidParameter("p must be positive".into()));
    }
    let eff = effective_subseries(b, &Rational::zero())?;
    if eff.rank(p)? == 0 {
        return Err(Error::Degenerate(format!("B^[0]_{p} = 0")));
    }
    let model = match &eff.model {
        SeriesModel::Monomial(m) => SeriesModel::Monomial(MonomialModel {
            weight: m.weight.clone(),
            selection: Selection::generated(p, m.selection.clone()),
        }),
        SeriesModel::Explicit(ex) => {
            let mut spans = BTreeMap::new();
            let top = ex.lattices.keys().next_back().copied().unwrap_or(0);
            if ex.lattices.contains_key(&0) {
                spans.insert(0, QMat::identity(ex.rank(0)?));
            }
            for k in 1..=top / p {
                if !ex.lattices.contains_key(&(k * p)) {
                    break;
                }
                spans.insert(k * p, product_span(ex, p, k)?);
            }
            SeriesModel::Explicit(ex.restrict(&spans)?)
        }
    };
    Ok(GradedSeries { model, ..eff })
}

/// Penalty `f` in `λ(x y) ≥ λ(x) - f(n) + λ(y) - f(m)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Penalty {
    Zero,
    /// `f(n) = c ln rank B_n`.
    LogRank(Rational),
}

impl Penalty {
    fn eval(&self, rank: usize) -> Result<Real> {
        match self {
            Penalty::Zero => Ok(Real::zero()),
            Penalty::LogRank(c) => Ok(Real::ln_int(rank.max(1) as u64).scale(c)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiSamples {
    pub pairs: Vec<(usize, usize)>,
    /// Random integer combinations per degree pair (in addition to basis monomials).
    pub random: usize,
    pub coeff_bound: i64,
    pub seed: u64,
}

/// One line per degree pair and sample kind; the margin is the worst observed
/// `λ(xy) - λ(x) - λ(y) + f(n) + f(m)`, exact.
pub fn quasi_filtered_audit(b: &GradedSeries, f: &Penalty, samples: &QuasiSamples) -> Result<AuditReport> {
    let mut degrees: Vec<usize> = samples.pairs.iter().flat_map(|&(n, m)| [n, m, n + m]).collect();
    degrees.sort_unstable();
    degrees.dedup();
    let ex_series = b.to_explicit(&degrees)?;
    let SeriesModel::Explicit(ex) = &ex_series.model else { unreachable!() };
    let mut rng = ChaCha8Rng::seed_from_u64(samples.seed);
    let mut report = AuditReport::new();
    for &(n, m) in &samples.pairs {
        let (ln, lm, ls) = (ex.component(n)?, ex.component(m)?, ex.component(n + m)?);
        let slack = &f.eval(ln.rank())? + &f.eval(lm.rank())?;
        let lam = |l: &NormedLattice, x: &[Rational]| -> Result<Real> { Ok(-l.log_norm(x)?) };
        let margin_of = |x: &[Rational], y: &[Rational]| -> Result<Option<Real>> {
            let xy = ex.product(n, x, m, y)?;
            if xy.iter().all(Zero::is_zero) {
                return Ok(None);
            }
            let lhs = lam(ls, &xy)?;
            Ok(Some(&(&(&lhs - &lam(ln, x)?) - &lam(lm, y)?) + &slack))
        };
        let unit = |r: usize, i: usize| {
            let mut v = vec![Rational::zero(); r];
            v[i] = Rational::one();
            v
        };
        // basis monomials, capped at 4096 pairs (evenly strided)
        let total = ln.rank() * lm.rank();
        let stride = total.div_ceil(4096).max(1);
        let mut worst: Option<Real> = None;
        for idx in (0..total).step_by(stride) {
            let (i, j) = (idx / lm.rank(), idx % lm.rank());
            if let Some(mg) = margin_of(&unit(ln.rank(), i), &unit(lm.rank(), j))? {
                worst = Some(worst.map_or(mg.clone(), |w| w.min(mg)));
            }
        }
        report.push(match worst {
            Some(w) => AuditEntry::ge(format!("quasi-filtered[{n},{m}]:basis"), &w, &Real::zero()),
            None => AuditEntry::hypothesis_failed(format!("quasi-filtered[{n},{m}]:basis"), "all products vanish".into()),
        });
        if samples.random > 0 {
            let mut worst: Option<Real> = None;
            let mut draw = |r: usize| -> Vec<Rational> {
                loop {
                    let v: Vec<Rational> = (0..r)
                        .map(|_| Rational::from_integer(rng.gen_range(-samples.coeff_bound..=samples.coeff_bound).into()))
                        .collect();
                    if v.iter().any(|x| !x.is_zero()) {
                        return v;
                    }
                }
            };
            for _ in 0..samples.random {
                let (x, y) = (draw(ln.rank()), draw(lm.rank()));
                if let Some(mg) = margin_of(&x, &y)? {
                    worst = Some(worst.map_or(mg.clone(), |w| w.min(mg)));
                }
            }
            if let Some(w) = worst {
                report.push(AuditEntry::ge(format!("quasi-filtered[{n},{m}]:random"), &w, &Real::zero()));
            }
        }
    }
    Ok(report)
}

/// `n^d / d!` as `f64`.
pub(crate) fn normalizer(n: usize, d: usize) -> f64 {
    let mut v = 1.0;
    for k in 1..=d {
        v *= n as f64 / k as f64;
    }
    v
}
