//! Finitely supported measures on ℝ with exact rational weights.
//!
//! Locations are [`Real`]s (exact), so translations, rescalings and the
//! cumulative distribution function are exact; only the Lévy distance is
//! computed in floating point.

use std::cmp::Ordering;
use std::fmt::Write as _;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{format_rational, parse_decimal, parse_rational, rational, Rational, Real};

/// Default absolute tolerance under which two locations are merged in dominance checks.
pub fn default_merge_tolerance() -> Rational {
    Rational::new(1.into(), num_bigint::BigInt::from(10u32).pow(30))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub x: Real,
    pub w: Rational,
}

/// Probability measure `Σ wᵢ δ_{xᵢ}`, or the zero measure (no atoms).
///
/// Locations strictly increasing, weights positive, total weight exactly 1
/// unless zero.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DiracMixture {
    atoms: Vec<Atom>,
}

impl DiracMixture {
    pub fn zero() -> Self {
        DiracMixture { atoms: Vec::new() }
    }

    pub fn dirac(x: Real) -> Self {
        DiracMixture {
            atoms: vec![Atom { x, w: Rational::one() }],
        }
    }

    /// Sorts, merges equal locations, and checks positivity and total mass 1.
    pub fn new(atoms: Vec<(Real, Rational)>) -> Result<Self> {
        let m = Self::normalize_atoms(atoms)?;
        if !m.atoms.is_empty() && m.total_weight() != Rational::one() {
            return Err(Error::InvalidParameter(format!(
                "weights sum to {}, expected 1",
                format_rational(&m.total_weight())
            )));
        }
        Ok(m)
    }

    fn normalize_atoms(mut atoms: Vec<(Real, Rational)>) -> Result<Self> {
        if let Some((_, w)) = atoms.iter().find(|(_, w)| !w.is_positive()) {
            return Err(Error::InvalidParameter(format!("non-positive weight {}", format_rational(w))));
        }
        sort_reals(&mut atoms, |a| &a.0)?;
        let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
        for (x, w) in atoms {
            match out.last_mut() {
                Some(last) if last.x == x => last.w += w,
                _ => out.push(Atom { x, w }),
            }
        }
        Ok(DiracMixture { atoms: out })
    }

    /// Uniform measure on the given locations (with multiplicity).
    pub fn uniform(xs: Vec<Real>) -> Result<Self> {
        if xs.is_empty() {
            return Ok(Self::zero());
        }
        let w = rational(1, xs.len() as i64);
        Self::new(xs.into_iter().map(|x| (x, w.clone())).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_weight(&self) -> Rational {
        self.atoms.iter().map(|a| &a.w).fold(Rational::zero(), |s, w| s + w)
    }

    pub fn min_location(&self) -> Option<&Real> {
        self.atoms.first().map(|a| &a.x)
    }

    pub fn max_location(&self) -> Option<&Real> {
        self.atoms.last().map(|a| &a.x)
    }

    /// `ν((-∞, t])`.
    pub fn cdf(&self, t: &Real) -> Rational {
        let mut acc = Rational::zero();
        for a in &self.atoms {
            if a.x > *t {
                break;
            }
            acc += &a.w;
        }
        acc
    }

    /// `ν([t, +∞))`.
    pub fn tail(&self, t: &Real) -> Rational {
        let mut acc = Rational::zero();
        for a in self.atoms.iter().rev() {
            if a.x < *t {
                break;
            }
            acc += &a.w;
        }
        acc
    }

    pub fn cdf_f64(&self, t: f64) -> f64 {
        self.atoms
            .iter()
            .take_while(|a| a.x.to_f64() <= t)
            .map(|a| a.w.to_f64().unwrap_or(0.0))
            .sum()
    }

    /// Image under `x ↦ x + a`.
    pub fn translate(&self, a: &Real) -> Self {
        DiracMixture {
            atoms: self.atoms.iter().map(|at| Atom { x: &at.x + a, w: at.w.clone() }).collect(),
        }
    }

    /// Image under `x ↦ εx`.
    pub fn rescale(&self, eps: &Rational) -> Result<Self> {
        if !eps.is_positive() {
            return Err(Error::InvalidParameter(format!(
                "rescaling factor must be positive, got {}",
                format_rational(eps)
            )));
        }
        Ok(DiracMixture {
            atoms: self.atoms.iter().map(|at| Atom { x: at.x.scale(eps), w: at.w.clone() }).collect(),
        })
    }

    /// Convex combination `Σ cᵢ νᵢ`; zero measures must carry coefficient 0.
    pub fn mix(parts: &[(Rational, &DiracMixture)]) -> Result<Self> {
        let mut atoms = Vec::new();
        for (c, m) in parts {
            if c.is_zero() {
                continue;
            }
            if m.is_zero() {
                return Err(Error::ZeroMeasure);
            }
            atoms.extend(m.atoms.iter().map(|a| (a.x.clone(), &a.w * c)));
        }
        Self::new(atoms)
    }

    /// `Σ wᵢ h(xᵢ)`, exact.
    pub fn integrate(&self, h: &PiecewiseLinear) -> Result<Real> {
        let mut acc = Real::zero();
        for a in &self.atoms {
            acc = acc + h.eval(&a.x)?.scale(&a.w);
        }
        Ok(acc)
    }

    pub fn integrate_f64(&self, h: &PiecewiseLinear) -> Result<f64> {
        let mut acc = 0.0;
        for a in &self.atoms {
            acc += h.eval_f64(a.x.to_f64())? * a.w.to_f64().unwrap_or(0.0);
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> MeasureJson {
        MeasureJson {
            atoms: self
                .atoms
                .iter()
                .map(|a| AtomJson {
                    x: a.x.to_decimal_string(),
                    w: format_rational(&a.w),
                })
                .collect(),
        }
    }

    /// Locations are read back as exact decimals.
    pub fn from_json(j: &MeasureJson) -> Result<Self> {
        let atoms: Result<Vec<(Real, Rational)>> = j
            .atoms
            .iter()
            .map(|a| Ok((Real::from_rational(parse_decimal(&a.x)?), parse_rational(&a.w)?)))
            .collect();
        Self::new(atoms?)
    }

    /// CSV with header `x,w,cdf`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,w,cdf\n");
        let mut cdf = Rational::zero();
        for a in &self.atoms {
            cdf += &a.w;
            let _ = writeln!(s, "{},{},{}", a.x.to_decimal_string(), format_rational(&a.w), format_rational(&cdf));
        }
        s
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MeasureJson {
    pub atoms: Vec<AtomJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct AtomJson {
    pub x: String,
    pub w: String,
}

fn sort_reals<T>(v: &mut [T], key: impl Fn(&T) -> &Real) -> Result<()> {
    let mut err = None;
    v.sort_by(|a, b| match key(a).try_cmp(key(b)) {
        Ok(o) => o,
        Err(e) => {
            err = Some(e);
            Ordering::Equal
        }
    });
    err.map_or(Ok(()), Err)
}

/// Outcome of comparing two measures in the stochastic order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dominance {
    Equal,
    /// `m2 ≺ m1`: the first measure sits to the right.
    FirstDominates,
    /// `m1 ≺ m2`.
    SecondDominates,
    Incomparable,
}

impl Dominance {
    /// Whether `m2 ≼ m1` (strictly or with equality).
    pub fn first_at_least(self) -> bool {
        matches!(self, Dominance::Equal | Dominance::FirstDominates)
    }
}

pub fn dominates(m1: &DiracMixture, m2: &DiracMixture) -> Result<Dominance> {
    dominates_with_tolerance(m1, m2, &default_merge_tolerance())
}

/// CDF comparison on the merged grid; locations closer than `tol` are identified.
pub fn dominates_with_tolerance(m1: &DiracMixture, m2: &DiracMixture, tol: &Rational) -> Result<Dominance> {
    if m1.is_zero() || m2.is_zero() {
        return Err(Error::ZeroMeasure);
    }
    let mut grid: Vec<(Real, usize, Rational)> = m1
        .atoms
        .iter()
        .map(|a| (a.x.clone(), 0, a.w.clone()))
        .chain(m2.atoms.iter().map(|a| (a.x.clone(), 1, a.w.clone())))
        .collect();
    sort_reals(&mut grid, |g| &g.0)?;
    let tol = Real::from_rational(tol.clone());
    let (mut f1, mut f2) = (Rational::zero(), Rational::zero());
    let (mut le, mut ge) = (true, true);
    let mut i = 0;
    while i < grid.len() {
        let mut j = i;
        loop {
            if grid[j].1 == 0 {
                f1 += &grid[j].2;
            } else {
                f2 += &grid[j].2;
            }
            if j + 1 < grid.len() && (&grid[j + 1].0 - &grid[j].0).try_cmp(&tol)? != Ordering::Greater {
                j += 1;
            } else {
                break;
            }
        }
        if f1 > f2 {
            le = false;
        }
        if f1 < f2 {
            ge = false;
        }
        i = j + 1;
    }
    Ok(match (le, ge) {
        (true, true) => Dominance::Equal,
        (true, false) => Dominance::FirstDominates,
        (false, true) => Dominance::SecondDominates,
        (false, false) => Dominance::Incomparable,
    })
}

/// `(min, max)` of `F₂(t) - F₁(t)` over all `t`, exact.
pub fn cdf_gap_range(m1: &DiracMixture, m2: &DiracMixture) -> Result<(Rational, Rational)> {
    let mut grid: Vec<(Real, usize, Rational)> = m1
        .atoms
        .iter()
        .map(|a| (a.x.clone(), 0, a.w.clone()))
        .chain(m2.atoms.iter().map(|a| (a.x.clone(), 1, a.w.clone())))
        .collect();
    sort_reals(&mut grid, |g| &g.0)?;
    let mut gap = Rational::zero();
    let (mut lo, mut hi) = (Rational::zero(), Rational::zero());
    for (i, (_, which, w)) in grid.iter().enumerate() {
        if *which == 0 {
            gap -= w;
        } else {
            gap += w;
        }
        if i + 1 < grid.len() && grid[i + 1].0 == grid[i].0 {
            continue;
        }
        lo = lo.min(gap.clone());
        hi = hi.max(gap.clone());
    }
    Ok((lo, hi))
}

/// Reference distribution for the Lévy distance.
#[derive(Clone, Debug)]
pub enum Reference {
    Discrete(DiracMixture),
    Uniform { lo: f64, hi: f64 },
}

impl Reference {
    pub fn dirac(x: f64) -> Self {
        Reference::Discrete(DiracMixture::dirac(Real::from_rational(crate::real::rational_from_f64(x))))
    }
}

struct Steps {
    xs: Vec<f64>,
    // cumulative mass up to and including xs[i]
    cum: Vec<f64>,
}

impl Steps {
    fn of(m: &DiracMixture) -> Steps {
        let xs: Vec<f64> = m.atoms.iter().map(|a| a.x.to_f64()).collect();
        let mut acc = Rational::zero();
        let cum = m
            .atoms
            .iter()
            .map(|a| {
                acc += &a.w;
                acc.to_f64().unwrap_or(1.0)
            })
            .collect();
        Steps { xs, cum }
    }

    fn at(&self, t: f64) -> f64 {
        let k = self.xs.partition_point(|&x| x <= t);
        if k == 0 {
            0.0
        } else {
            self.cum[k - 1]
        }
    }

    fn before(&self, i: usize) -> f64 {
        if i == 0 {
            0.0
        } else {
            self.cum[i - 1]
        }
    }
}

fn uniform_cdf(lo: f64, hi: f64, t: f64) -> f64 {
    if hi <= lo {
        return if t >= lo { 1.0 } else { 0.0 };
    }
    ((t - lo) / (hi - lo)).clamp(0.0, 1.0)
}

/// Lévy distance between two probability measures.
pub fn cdf_distance(m1: &DiracMixture, m2: &DiracMixture) -> Result<f64> {
    levy_distance(m1, &Reference::Discrete(m2.clone()))
}

pub fn levy_distance(m: &DiracMixture, reference: &Reference) -> Result<f64> {
    if m.is_zero() {
        return Err(Error::ZeroMeasure);
    }
    let f = Steps::of(m);
    let ok: Box<dyn Fn(f64) -> bool> = match reference {
        Reference::Discrete(other) => {
            if other.is_zero() {
                return Err(Error::ZeroMeasure);
            }
            let g = Steps::of(other);
            Box::new(move |eps| step_pair_ok(&f, &g, eps) && step_pair_ok(&g, &f, eps))
        }
        &Reference::Uniform { lo, hi } => Box::new(move |eps| {
            // sup U(x) - F(x+ε): left limits of F-steps; sup F(x) - U(x+ε): left ends
            let n = f.xs.len();
            for i in 0..n {
                if uniform_cdf(lo, hi, f.xs[i] - eps) - f.before(i) > eps + 1e-15 {
                    return false;
                }
                if f.cum[i] - uniform_cdf(lo, hi, f.xs[i] + eps) > eps + 1e-15 {
                    return false;
                }
            }
            true
        }),
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if ok(0.0) {
        return Ok(0.0);
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Kolmogorov distance `sup_x |F(x) - G(x)|` (floating point).
pub fn kolmogorov_distance(m: &DiracMixture, reference: &Reference) -> Result<f64> {
    if m.is_zero() {
        return Err(Error::ZeroMeasure);
    }
    let f = Steps::of(m);
    match reference {
        Reference::Discrete(other) => {
            if other.is_zero() {
                return Err(Error::ZeroMeasure);
            }
            let g = Steps::of(other);
            // both CDFs are right-continuous steps: compare right values at every breakpoint
            Ok(f.xs.iter().chain(&g.xs).map(|&x| (f.at(x) - g.at(x)).abs()).fold(0.0, f64::max))
        }
        &Reference::Uniform { lo, hi } => Ok((0..f.xs.len())
            .map(|i| {
                let u = uniform_cdf(lo, hi, f.xs[i]);
                (f.cum[i] - u).abs().max((f.before(i) - u).abs())
            })
            .fold(0.0, f64::max)),
    }
}

/// `G(x) ≤ F(x+ε) + ε` for all x, checked at every breakpoint of `x ↦ G(x) - F(x+ε)`.
fn step_pair_ok(g: &Steps, f: &Steps, eps: f64) -> bool {
    let tol = 1e-15;
    for (i, &x) in g.xs.iter().enumerate() {
        if g.cum[i] - f.at(x + eps) > eps + tol {
            return false;
        }
    }
    for (i, &y) in f.xs.iter().enumerate() {
        if g.at(y - eps) - f.cum[i] > eps + tol {
            return false;
        }
    }
    true
}

/// Piecewise-linear function: linear interpolation between rational knots,
/// extended linearly beyond the outer knots with the given slopes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseLinear {
    knots: Vec<(Rational, Rational)>,
    left_slope: Rational,
    right_slope: Rational,
    domain: Option<(Rational, Rational)>,
}

impl PiecewiseLinear {
    pub fn new(knots: Vec<(Rational, Rational)>, left_slope: Rational, right_slope: Rational) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::InvalidParameter("piecewise-linear function needs a knot".into()));
        }
        if knots.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidParameter("knots must be strictly increasing".into()));
        }
        Ok(PiecewiseLinear {
            knots,
            left_slope,
            right_slope,
            domain: None,
        })
    }

    /// Restricts the function to `[lo, hi]`; evaluation outside fails.
    pub fn with_domain(mut self, lo: Rational, hi: Rational) -> Self {
        self.domain = Some((lo, hi));
        self
    }

    pub fn identity() -> Self {
        Self::new(vec![(Rational::zero(), Rational::zero())], Rational::one(), Rational::one()).expect("valid")
    }

    /// `max{x, 0}`.
    pub fn positive_part() -> Self {
        Self::new(vec![(Rational::zero(), Rational::zero())], Rational::zero(), Rational::one()).expect("valid")
    }

    /// `min{x, c}`.
    pub fn min_with(c: Rational) -> Self {
        Self::new(vec![(c.clone(), c)], Rational::one(), Rational::zero()).expect("valid")
    }

    /// Bounded function from knot values, constant outside the knot range.
    pub fn bounded(knots: Vec<(Rational, Rational)>) -> Result<Self> {
        Self::new(knots, Rational::zero(), Rational::zero())
    }

    pub fn knots(&self) -> &[(Rational, Rational)] {
        &self.knots
    }

    /// `x ↦ h(x + a)`.
    pub fn shifted(&self, a: &Rational) -> Self {
        PiecewiseLinear {
            knots: self.knots.iter().map(|(x, y)| (x - a, y.clone())).collect(),
            left_slope: self.left_slope.clone(),
            right_slope: self.right_slope.clone(),
            domain: self.domain.as_ref().map(|(l, h)| (l - a, h - a)),
        }
    }

    /// `sup |h|` over ℝ (or the domain), `None` when unbounded.
    pub fn sup_abs(&self) -> Option<Rational> {
        let mut pts: Vec<Rational> = self.knots.iter().map(|(_, y)| y.abs()).collect();
        match &self.domain {
            Some((lo, hi)) => {
                pts.push(self.eval_rational(lo).abs());
                pts.push(self.eval_rational(hi).abs());
            }
            None => {
                if !self.left_slope.is_zero() || !self.right_slope.is_zero() {
                    return None;
                }
            }
        }
        pts.into_iter().max()
    }

    fn eval_rational(&self, x: &Rational) -> Rational {
        let n = self.knots.len();
        if *x <= self.knots[0].0 {
            let (x0, y0) = &self.knots[0];
            return y0 + &self.left_slope * (x - x0);
        }
        if *x >= self.knots[n - 1].0 {
            let (x1, y1) = &self.knots[n - 1];
            return y1 + &self.right_slope * (x - x1);
        }
        let i = self.knots.partition_point(|(k, _)| k <= x);
        let (xa, ya) = &self.knots[i - 1];
        let (xb, yb) = &self.knots[i];
        ya + (yb - ya) / (xb - xa) * (x - xa)
    }

    fn segment(&self, i: usize) -> (Rational, Rational, Rational) {
        // (anchor x, anchor y, slope) on the piece starting after knot i-1
        let n = self.knots.len();
        if i == 0 {
            let (x0, y0) = &self.knots[0];
            (x0.clone(), y0.clone(), self.left_slope.clone())
        } else if i == n {
            let (x1, y1) = &self.knots[n - 1];
            (x1.clone(), y1.clone(), self.right_slope.clone())
        } else {
            let (xa, ya) = &self.knots[i - 1];
            let (xb, yb) = &self.knots[i];
            (xa.clone(), ya.clone(), (yb - ya) / (xb - xa))
        }
    }

    pub fn eval(&self, x: &Real) -> Result<Real> {
        if let Some((lo, hi)) = &self.domain {
            let below = x.try_cmp(&Real::from_rational(lo.clone()))? == Ordering::Less;
            let above = x.try_cmp(&Real::from_rational(hi.clone()))? == Ordering::Greater;
            if below || above {
                return Err(Error::Undefined(x.to_decimal_digits(12)));
            }
        }
        if let Some(q) = x.as_rational() {
            return Ok(Real::from_rational(self.eval_rational(q)));
        }
        let mut i = 0;
        while i < self.knots.len() && x.try_cmp(&Real::from_rational(self.knots[i].0.clone()))? == Ordering::Greater {
            i += 1;
        }
        let (ax, ay, s) = self.segment(i);
        Ok(Real::from_rational(ay - &s * &ax) + x.scale(&s))
    }

    pub fn eval_f64(&self, x: f64) -> Result<f64> {
        if let Some((lo, hi)) = &self.domain {
            if x < lo.to_f64().unwrap_or(f64::NEG_INFINITY) || x > hi.to_f64().unwrap_or(f64::INFINITY) {
                return Err(Error::Undefined(format!("{x}")));
            }
        }
        let i = self.knots.partition_point(|(k, _)| k.to_f64().unwrap_or(0.0) < x);
        let (ax, ay, s) = self.segment(i);
        let f = |q: &Rational| q.to_f64().unwrap_or(f64::NAN);
        Ok(f(&ay) + f(&s) * (x - f(&ax)))
    }
}
