//! ℝ-filtered finite-dimensional rational vector spaces.
//!
//! A filtration is stored as its jump data `(t_1, V_1), …, (t_m, V_m)` with
//! `t_1 < … < t_m`, `V_1 = W ⊋ V_2 ⊋ … ⊋ V_m ≠ 0`, and
//! `F_t = V_k` for `t_{k-1} < t ≤ t_k` (`t_0 = -∞`), `F_t = 0` for `t > t_m`.
//! This makes `t ↦ F_t` decreasing and left-continuous by construction.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::audit::{AuditEntry, Verdict};
use crate::error::{Error, Result};
use crate::linalg::QMat;
use crate::measure::{cdf_gap_range, dominates, DiracMixture, PiecewiseLinear};
use crate::real::{format_rational, parse_decimal, parse_rational, rational, ExtReal, Rational, Real};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagEntry {
    pub level: Real,
    /// Columns form a basis of the member.
    pub basis: QMat,
}

impl FlagEntry {
    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredSpace {
    dim: usize,
    flag: Vec<FlagEntry>,
}

impl FilteredSpace {
    /// Canonicalizes arbitrary jump data: sorts by level, merges repeated
    /// levels with equal members and consecutive equal members (keeping the
    /// higher level), drops zero members; rejects non-nested data, distinct
    /// members at one level, and a lowest member that is not the whole space.
    pub fn new(dim: usize, entries: Vec<(Real, QMat)>) -> Result<Self> {
        let mut entries: Vec<(Real, QMat)> = entries
            .into_iter()
            .map(|(t, b)| {
                if b.nrows() != dim && b.ncols() > 0 {
                    Err(Error::DimensionMismatch { expected: dim, got: b.nrows() })
                } else {
                    Ok((t, if b.ncols() == 0 { QMat::zeros(dim, 0) } else { b.column_basis() }))
                }
            })
            .collect::<Result<_>>()?;
        let mut err = None;
        entries.sort_by(|a, b| {
            a.0.try_cmp(&b.0).unwrap_or_else(|e| {
                err = Some(e);
                Ordering::Equal
            })
        });
        if let Some(e) = err {
            return Err(e);
        }
        let mut flag: Vec<FlagEntry> = Vec::new();
        for (level, basis) in entries {
            if let Some(last) = flag.last() {
                let same_level = last.level == level;
                let contained = last.basis.spans(&basis);
                let equal = contained && basis.ncols() == last.rank();
                if same_level && !equal {
                    return Err(Error::InconsistentFlag(format!(
                        "two different members at level {}",
                        level.to_decimal_digits(12)
                    )));
                }
                if !contained {
                    return Err(Error::InconsistentFlag("members are not nested".into()));
                }
                if equal {
                    flag.last_mut().expect("nonempty").level = level;
                    continue;
                }
            }
            flag.push(FlagEntry { level, basis });
        }
        flag.retain(|e| e.rank() > 0);
        if dim == 0 {
            return Ok(FilteredSpace { dim, flag: Vec::new() });
        }
        match flag.first() {
            Some(first) if first.rank() == dim => Ok(FilteredSpace { dim, flag }),
            Some(_) => Err(Error::InconsistentFlag("lowest member is not the whole space".into())),
            None => Err(Error::InconsistentFlag("no member equals the whole space".into())),
        }
    }

    /// Whole space at every `t ≤ level`, zero above.
    pub fn single_jump(dim: usize, level: Real) -> Self {
        if dim == 0 {
            return FilteredSpace::zero_space();
        }
        FilteredSpace {
            dim,
            flag: vec![FlagEntry {
                level,
                basis: QMat::identity(dim),
            }],
        }
    }

    pub fn zero_space() -> Self {
        FilteredSpace { dim: 0, flag: Vec::new() }
    }

    /// Coordinate filtration: `F_t = span{e_j | c_j ≥ t}`.
    pub fn from_coordinate_levels(levels: &[Real]) -> Self {
        let dim = levels.len();
        let mut distinct: Vec<Real> = levels.to_vec();
        distinct.sort();
        distinct.dedup();
        let entries = distinct
            .into_iter()
            .map(|t| {
                let cols: Vec<Vec<Rational>> = (0..dim)
                    .filter(|&j| levels[j] >= t)
                    .map(|j| unit(dim, j))
                    .collect();
                (t, QMat::from_cols(dim, &cols).expect("unit vectors"))
            })
            .collect();
        FilteredSpace::new(dim, entries).expect("coordinate flag is consistent")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn flag(&self) -> &[FlagEntry] {
        &self.flag
    }

    pub fn levels(&self) -> Vec<Real> {
        self.flag.iter().map(|e| e.level.clone()).collect()
    }

    /// `F_t`.
    pub fn member_at(&self, t: &Real) -> QMat {
        self.flag
            .iter()
            .find(|e| *t <= e.level)
            .map(|e| e.basis.clone())
            .unwrap_or_else(|| QMat::zeros(self.dim, 0))
    }

    pub fn rank_at(&self, t: &Real) -> usize {
        self.flag.iter().find(|e| *t <= e.level).map_or(0, FlagEntry::rank)
    }

    /// Atom at each jump level with weight (rank drop)/dim.
    pub fn measure_of(&self) -> DiracMixture {
        if self.dim == 0 {
            return DiracMixture::zero();
        }
        let atoms = self
            .flag
            .iter()
            .enumerate()
            .map(|(k, e)| {
                let next = self.flag.get(k + 1).map_or(0, FlagEntry::rank);
                (e.level.clone(), rational((e.rank() - next) as i64, self.dim as i64))
            })
            .collect();
        DiracMixture::new(atoms).expect("rank drops sum to dim")
    }

    /// `sup{t | v ∈ F_t}`; `+∞` for `v = 0`.
    pub fn lambda_of(&self, v: &[Rational]) -> Result<ExtReal> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: v.len() });
        }
        if v.iter().all(Zero::is_zero) {
            return Ok(ExtReal::PosInf);
        }
        let k = self
            .flag
            .iter()
            .rposition(|e| e.basis.contains_vec(v))
            .expect("lowest member is the whole space");
        Ok(ExtReal::Finite(self.flag[k].level.clone()))
    }

    /// `sup{t | U ⊆ F_t}` for the column space `U` of `sub`.
    pub fn lambda_of_subspace(&self, sub: &QMat) -> Result<ExtReal> {
        if sub.nrows() != self.dim && sub.ncols() > 0 {
            return Err(Error::DimensionMismatch { expected: self.dim, got: sub.nrows() });
        }
        if sub.ncols() == 0 || sub.rank() == 0 {
            return Ok(ExtReal::PosInf);
        }
        let k = self
            .flag
            .iter()
            .rposition(|e| e.basis.spans(sub))
            .expect("lowest member is the whole space");
        Ok(ExtReal::Finite(self.flag[k].level.clone()))
    }

    /// `(λ_max, λ_min)`; `(-∞, +∞)` for the zero space.
    pub fn lambda_extremes(&self) -> (ExtReal, ExtReal) {
        match (self.flag.last(), self.flag.first()) {
            (Some(top), Some(bottom)) => (ExtReal::Finite(top.level.clone()), ExtReal::Finite(bottom.level.clone())),
            _ => (ExtReal::NegInf, ExtReal::PosInf),
        }
    }

    /// All levels shifted by `a`.
    pub fn shifted(&self, a: &Real) -> Self {
        FilteredSpace {
            dim: self.dim,
            flag: self
                .flag
                .iter()
                .map(|e| FlagEntry {
                    level: &e.level + a,
                    basis: e.basis.clone(),
                })
                .collect(),
        }
    }

    fn check_subspace(&self, sub: &QMat) -> Result<()> {
        if sub.ncols() > 0 && sub.nrows() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: sub.nrows() });
        }
        if sub.ncols() > 0 && !sub.has_full_column_rank() {
            return Err(Error::RankDeficient);
        }
        Ok(())
    }

    /// `F_t ∩ V` in the coordinates of the given basis of `V`.
    pub fn induced_sub(&self, sub: &QMat) -> Result<FilteredSpace> {
        self.check_subspace(sub)?;
        let k = sub.ncols();
        if k == 0 {
            return Ok(FilteredSpace::zero_space());
        }
        let mut entries = Vec::with_capacity(self.flag.len());
        for e in &self.flag {
            let inter = e.basis.intersect(sub)?;
            let coords = if inter.ncols() == 0 { QMat::zeros(k, 0) } else { sub.solve_cols(&inter)? };
            entries.push((e.level.clone(), coords));
        }
        FilteredSpace::new(k, entries)
    }

    /// `(F_t + V)/V` in quotient coordinates.
    pub fn induced_quotient(&self, sub: &QMat) -> Result<FilteredSpace> {
        self.check_subspace(sub)?;
        let (p_inv, k) = quotient_projection(self.dim, sub)?;
        let q = self.dim - k;
        if q == 0 {
            return Ok(FilteredSpace::zero_space());
        }
        let mut entries = Vec::with_capacity(self.flag.len());
        for e in &self.flag {
            let coords = p_inv.mul(&e.basis)?;
            let image: Vec<Vec<Rational>> = coords.cols().into_iter().map(|c| c[k..].to_vec()).collect();
            let image = QMat::from_cols(q, &image)?;
            let image = if image.rank() == 0 { QMat::zeros(q, 0) } else { image.column_basis() };
            entries.push((e.level.clone(), image));
        }
        FilteredSpace::new(q, entries)
    }

    pub fn to_json(&self) -> FiltrationJson {
        FiltrationJson {
            dim: self.dim,
            flag: self
                .flag
                .iter()
                .map(|e| FlagEntryJson {
                    t: e.level.to_decimal_string(),
                    basis: e.basis.cols().iter().map(|c| c.iter().map(format_rational).collect()).collect(),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &FiltrationJson) -> Result<Self> {
        let mut entries = Vec::new();
        for e in &j.flag {
            let t = Real::from_rational(parse_decimal(&e.t)?);
            let cols: Vec<Vec<Rational>> = e
                .basis
                .iter()
                .map(|c| c.iter().map(|s| parse_rational(s)).collect::<Result<_>>())
                .collect::<Result<_>>()?;
            entries.push((t, QMat::from_cols(j.dim, &cols)?));
        }
        FilteredSpace::new(j.dim, entries)
    }
}

/// `(P⁻¹, k)` where `P = [V | e_C]` completes the basis of `V` by standard vectors
/// chosen greedily; the last `dim - k` coordinates of `P⁻¹x` are the quotient coordinates.
pub fn quotient_projection(dim: usize, sub: &QMat) -> Result<(QMat, usize)> {
    let k = sub.ncols();
    let comp = if k == 0 { (0..dim).collect() } else { sub.standard_complement() };
    let ecols: Vec<Vec<Rational>> = comp.iter().map(|&j| unit(dim, j)).collect();
    let e = QMat::from_cols(dim, &ecols)?;
    let p = if k == 0 { e } else { sub.hcat(&e)? };
    Ok((p.inverse()?, k))
}

fn unit(dim: usize, j: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); dim];
    v[j] = Rational::one();
    v
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FiltrationJson {
    pub dim: usize,
    pub flag: Vec<FlagEntryJson>,
}

/// `basis` lists basis vectors of the member, each as a list of rationals.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FlagEntryJson {
    pub t: String,
    pub basis: Vec<Vec<String>>,
}

fn compact(m: &DiracMixture) -> String {
    m.atoms()
        .iter()
        .map(|a| format!("{}@{}", format_rational(&a.w), a.x.to_decimal_digits(16)))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// `ν_W = (k/r) ν_{W'} + ((r-k)/r) ν_{W''}`, compared with zero tolerance.
/// The margin is the negated Kolmogorov distance between the two sides (0 on success).
pub fn check_exact_sequence(sub: &FilteredSpace, total: &FilteredSpace, quot: &FilteredSpace) -> Result<AuditEntry> {
    let r = total.dim();
    if sub.dim() + quot.dim() != r {
        return Err(Error::DimensionMismatch {
            expected: r,
            got: sub.dim() + quot.dim(),
        });
    }
    let lhs = total.measure_of();
    let rhs = if r == 0 {
        DiracMixture::zero()
    } else {
        DiracMixture::mix(&[
            (rational(sub.dim() as i64, r as i64), &sub.measure_of()),
            (rational(quot.dim() as i64, r as i64), &quot.measure_of()),
        ])?
    };
    let (lo, hi) = cdf_gap_range(&lhs, &rhs)?;
    let dist = hi.max(-lo);
    let verdict = if lhs == rhs { Verdict::Pass } else { Verdict::Fail };
    Ok(AuditEntry::new(
        "exact-sequence",
        compact(&lhs),
        compact(&rhs),
        format_rational(&-dist),
        verdict,
    ))
}

/// Largest `a` with `φ(F_t V) ⊆ G_{t+a} W` for all `t`.
pub fn max_admissible_shift(fs_v: &FilteredSpace, fs_w: &FilteredSpace, iso: &QMat) -> Result<ExtReal> {
    let mut best = ExtReal::PosInf;
    for e in fs_v.flag() {
        let image = iso.mul(&e.basis)?;
        let cand = match fs_w.lambda_of_subspace(&image)? {
            ExtReal::Finite(l) => ExtReal::Finite(&l - &e.level),
            other => other,
        };
        best = best.min(cand);
    }
    Ok(best)
}

/// Under `φ(F_t V) ⊆ G_{t+a} W` (checked first), `ν_W ≻ τ_a ν_V`.
/// Margin is `min_t (F_{τ_a ν_V}(t) - F_{ν_W}(t))`.
pub fn check_shift_domination(fs_v: &FilteredSpace, fs_w: &FilteredSpace, iso: &QMat, a: &Real) -> Result<AuditEntry> {
    let id = "shift-domination";
    if fs_v.dim() != fs_w.dim() {
        return Err(Error::DimensionMismatch {
            expected: fs_v.dim(),
            got: fs_w.dim(),
        });
    }
    if iso.nrows() != fs_w.dim() || iso.ncols() != fs_v.dim() || iso.rank() != fs_v.dim() {
        return Err(Error::InvalidParameter("map is not an isomorphism".into()));
    }
    for e in fs_v.flag() {
        let image = iso.mul(&e.basis)?;
        let target = fs_w.member_at(&(&e.level + a));
        if !target.spans(&image) {
            return Ok(AuditEntry::hypothesis_failed(
                id,
                format!("image of the member at {} leaves the shifted filtration", e.level.to_decimal_digits(12)),
            ));
        }
    }
    if fs_v.dim() == 0 {
        return Ok(AuditEntry::new(id, String::new(), String::new(), "0".into(), Verdict::Pass));
    }
    let nu_w = fs_w.measure_of();
    let shifted = fs_v.measure_of().translate(a);
    let dom = dominates(&nu_w, &shifted)?;
    let (lo, _) = cdf_gap_range(&nu_w, &shifted)?;
    let verdict = if dom.first_at_least() { Verdict::Pass } else { Verdict::Fail };
    Ok(AuditEntry::new(id, compact(&nu_w), compact(&shifted), format_rational(&lo), verdict))
}

/// `|∫h dν_W - ∫h dν_V| ≤ 2ε sup|h|` with `ε = 1 - rank V / rank W`.
pub fn check_subspace_bound(fs: &FilteredSpace, sub: &QMat, h: &PiecewiseLinear) -> Result<AuditEntry> {
    let sup = h
        .sup_abs()
        .ok_or_else(|| Error::InvalidParameter("test function must be bounded".into()))?;
    let induced = fs.induced_sub(sub)?;
    if induced.dim() == 0 || fs.dim() == 0 {
        return Err(Error::ZeroMeasure);
    }
    let diff = (fs.measure_of().integrate(h)? - induced.measure_of().integrate(h)?).abs();
    let eps = Rational::one() - rational(induced.dim() as i64, fs.dim() as i64);
    let bound = Real::from_rational(rational(2, 1) * eps * sup);
    debug_assert!(!bound.rational_part().is_negative());
    Ok(AuditEntry::le("subspace-bound", &diff, &bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::qvec;

    fn r(n: i64) -> Real {
        Real::from_int(n)
    }

    fn cols(dim: usize, vs: &[&[i64]]) -> QMat {
        QMat::from_cols(dim, &vs.iter().map(|v| qvec(v)).collect::<Vec<_>>()).unwrap()
    }

    /// rank 2, F_t = ℚ² for t ≤ 1, span(e₁) for 1 < t ≤ 3.
    fn two_step() -> FilteredSpace {
        FilteredSpace::new(2, vec![(r(1), QMat::identity(2)), (r(3), cols(2, &[&[1, 0]]))]).unwrap()
    }

    #[test]
    fn measure_examples() {
        let m = two_step().measure_of();
        assert_eq!(m, DiracMixture::new(vec![(r(1), rational(1, 2)), (r(3), rational(1, 2))]).unwrap());
        assert_eq!(FilteredSpace::single_jump(1, r(5)).measure_of(), DiracMixture::dirac(r(5)));
        assert_eq!(FilteredSpace::single_jump(3, r(0)).measure_of(), DiracMixture::dirac(r(0)));
        assert!(FilteredSpace::zero_space().measure_of().is_zero());
    }

    #[test]
    fn canonicalization() {
        // repeated member at two levels collapses to the higher one
        let fs = FilteredSpace::new(
            2,
            vec![(r(0), QMat::identity(2)), (r(1), cols(2, &[&[1, 1], &[0, 2]])), (r(2), cols(2, &[&[1, 0]]))],
        )
        .unwrap();
        assert_eq!(fs.levels(), vec![r(1), r(2)]);
        // not nested
        assert!(FilteredSpace::new(2, vec![(r(0), QMat::identity(2)), (r(1), cols(2, &[&[1, 0]])), (r(2), cols(2, &[&[0, 1]]))]).is_err());
        // lowest member not the whole space
        assert!(FilteredSpace::new(2, vec![(r(0), cols(2, &[&[1, 0]]))]).is_err());
        // conflicting members at one level
        assert!(FilteredSpace::new(2, vec![(r(0), QMat::identity(2)), (r(0), cols(2, &[&[1, 0]]))]).is_err());
    }

    #[test]
    fn lambda_examples() {
        let fs = two_step();
        assert_eq!(fs.lambda_of(&qvec(&[0, 0])).unwrap(), ExtReal::PosInf);
        assert_eq!(fs.lambda_of(&qvec(&[2, 0])).unwrap(), ExtReal::Finite(r(3)));
        assert_eq!(fs.lambda_of(&qvec(&[1, 1])).unwrap(), ExtReal::Finite(r(1)));
        assert!(fs.lambda_of(&qvec(&[1])).is_err());
        assert_eq!(fs.lambda_extremes(), (ExtReal::Finite(r(3)), ExtReal::Finite(r(1))));
        assert_eq!(FilteredSpace::zero_space().lambda_extremes(), (ExtReal::NegInf, ExtReal::PosInf));
        assert_eq!(FilteredSpace::single_jump(2, r(0)).lambda_extremes(), (ExtReal::Finite(r(0)), ExtReal::Finite(r(0))));
    }

    #[test]
    fn induced_examples() {
        let fs = two_step();
        let whole = fs.induced_sub(&QMat::identity(2)).unwrap();
        assert_eq!(whole.measure_of(), fs.measure_of());
        let deep = fs.induced_sub(&cols(2, &[&[1, 0]])).unwrap();
        assert_eq!(deep.measure_of(), DiracMixture::dirac(r(3)));
        let line = fs.induced_sub(&cols(2, &[&[1, 1]])).unwrap();
        assert_eq!(line.measure_of(), DiracMixture::dirac(r(1)));
        assert_eq!(fs.induced_quotient(&QMat::zeros(2, 0)).unwrap(), fs);
        assert_eq!(fs.induced_quotient(&QMat::identity(2)).unwrap().dim(), 0);
        let q = fs.induced_quotient(&cols(2, &[&[1, 0]])).unwrap();
        assert_eq!(q.measure_of(), DiracMixture::dirac(r(1)));
        assert!(fs.induced_sub(&cols(2, &[&[1, 0], &[2, 0]])).is_err());
    }

    #[test]
    fn exact_sequence_examples() {
        // W' = span(e₁) jumps at 2, W'' jumps at 0
        let fs = FilteredSpace::new(2, vec![(r(0), QMat::identity(2)), (r(2), cols(2, &[&[1, 0]]))]).unwrap();
        let v = cols(2, &[&[1, 0]]);
        let e = check_exact_sequence(&fs.induced_sub(&v).unwrap(), &fs, &fs.induced_quotient(&v).unwrap()).unwrap();
        assert_eq!(e.verdict, Verdict::Pass);
        let z = QMat::zeros(2, 0);
        let e = check_exact_sequence(&fs.induced_sub(&z).unwrap(), &fs, &fs.induced_quotient(&z).unwrap()).unwrap();
        assert_eq!(e.verdict, Verdict::Pass);
        // a wrong quotient is caught
        let e = check_exact_sequence(&fs.induced_sub(&v).unwrap(), &fs, &FilteredSpace::single_jump(1, r(1))).unwrap();
        assert_eq!(e.verdict, Verdict::Fail);
    }

    #[test]
    fn shift_domination_examples() {
        let fs = two_step();
        let id = QMat::identity(2);
        assert_eq!(check_shift_domination(&fs, &fs, &id, &r(0)).unwrap().verdict, Verdict::Pass);
        assert_eq!(check_shift_domination(&fs, &fs.shifted(&r(1)), &id, &r(1)).unwrap().verdict, Verdict::Pass);
        assert_eq!(check_shift_domination(&fs, &fs, &id, &r(1)).unwrap().verdict, Verdict::HypothesisFailed);
        assert_eq!(max_admissible_shift(&fs, &fs, &id).unwrap(), ExtReal::Finite(r(0)));
    }

    #[test]
    fn json_roundtrip() {
        let fs = two_step();
        let j = serde_json::to_string(&fs.to_json()).unwrap();
        assert_eq!(j, r#"{"dim":2,"flag":[{"t":"1","basis":[["1","0"],["0","1"]]},{"t":"3","basis":[["1","0"]]}]}"#);
        assert_eq!(FilteredSpace::from_json(&serde_json::from_str(&j).unwrap()).unwrap(), fs);
    }
}
