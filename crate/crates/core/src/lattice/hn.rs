//! Harder–Narasimhan flags of Euclidean lattices.
//!
//! The maximal destabilizing sublattice is found by an exhaustive search with
//! a certified radius. Let `S` have minimal covolume among saturated rank-`k`
//! sublattices. Then `λ_i(S) ≥ λ_i(L)`, and Minkowski's second theorem with
//! Hadamard's inequality for the span of the first `k` minima of `L` give
//! `λ_k(S)² ≤ γ_k^k λ_k(L)²`. So `S` is the saturation of the span of `k`
//! independent vectors of squared length `≤ γ_k^k λ_k(L)²`. For `2k > r` the
//! search runs on the dual lattice instead, where orthogonal complements
//! exchange rank `k` and `r - k` and `covol(S) = covol(S^⊥) covol(L)`.
//! The flag is completed by recursion on the quotient with the orthogonal
//! projection (Schur complement) metric.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::enumerate::fincke_pohst;
use super::minima::successive_minima;
use super::{LatticeOptions, Norm, NormedLattice};
use crate::error::{Error, Result};
use crate::filtration::FilteredSpace;
use crate::intlat::{complete_basis, hnf, integer_kernel, saturate, to_qmat, IVec};
use crate::linalg::QMat;
use crate::real::{rational, Rational, Real};

/// `γ_k^k` for `k ≤ 8` (exact values of Hermite's constants).
fn hermite_power(k: usize) -> Option<Rational> {
    let v = match k {
        1 => rational(1, 1),
        2 => rational(4, 3),
        3 => rational(2, 1),
        4 => rational(4, 1),
        5 => rational(8, 1),
        6 => rational(64, 3),
        7 => rational(64, 1),
        8 => rational(256, 1),
        _ => return None,
    };
    Some(v)
}

/// Flag `0 ⊊ E_1 ⊊ … ⊊ E_n = L` with slopes `μ_1 > … > μ_n` of the subquotients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HnFlag {
    /// Each member as the rows of its Hermite normal form basis.
    pub members: Vec<Vec<IVec>>,
    pub slopes: Vec<Real>,
}

impl HnFlag {
    pub fn ranks(&self) -> Vec<usize> {
        self.members.iter().map(Vec::len).collect()
    }

    pub fn is_semistable(&self) -> bool {
        self.members.len() == 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlopeInvariants {
    pub degree: Real,
    pub slope: Real,
    pub mu_max: Real,
    pub mu_min: Real,
    pub flag: HnFlag,
}

/// `B G Bᵀ` for integer rows `B`.
pub(crate) fn sub_gram(gram: &QMat, rows: &[IVec]) -> QMat {
    let b = to_qmat(rows, gram.nrows());
    b.transpose().mul(&gram.mul(&b).expect("dims")).expect("dims")
}

/// `det_a^{1/a} < det_b^{1/b}`, i.e. the rank-`a` candidate has strictly larger slope.
fn steeper(det_a: &Rational, a: usize, det_b: &Rational, b: usize) -> bool {
    det_a.pow(b as i32) < det_b.pow(a as i32)
}

struct Searcher {
    budget: u64,
    kappa: Option<Rational>,
}

impl Searcher {
    /// Saturated rank-`k` sublattice of minimal covolume, with its gram determinant.
    fn min_det(&self, gram: &QMat, k: usize) -> Result<(Vec<IVec>, Rational)> {
        let r = gram.nrows();
        if k == r {
            let id: Vec<IVec> = (0..r).map(|i| unit_ivec(r, i)).collect();
            return Ok((id, gram.det()?));
        }
        if 2 * k > r {
            let dual = gram.inverse()?;
            let (t, det_t) = self.min_det_direct(&dual, r - k)?;
            let s = hnf(&integer_kernel(&t, r));
            return Ok((s, det_t * gram.det()?));
        }
        self.min_det_direct(gram, k)
    }

    fn min_det_direct(&self, gram: &QMat, k: usize) -> Result<(Vec<IVec>, Rational)> {
        let r = gram.nrows();
        let m = successive_minima(&NormedLattice::euclidean(gram.clone())?, self.budget)?;
        let sq = |i: usize| gram.quad_form(&m.vectors[i]);
        let radius = match &self.kappa {
            Some(kappa) => kappa * kappa * sq(r - 1),
            None => {
                let g = hermite_power(k).ok_or_else(|| Error::Unsupported(format!("sublattice search in rank {k}")))?;
                g * sq(k - 1)
            }
        };
        let cands: Vec<IVec> = fincke_pohst(gram, &radius, self.budget, true)?
            .into_iter()
            .map(|v| v.coords.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        // breadth-first over saturated partial spans, deduplicated by HNF
        let mut frontier: BTreeSet<Vec<IVec>> = BTreeSet::new();
        frontier.insert(Vec::new());
        for _ in 0..k {
            let mut next = BTreeSet::new();
            for base in &frontier {
                let span = to_qmat(base, r);
                for c in &cands {
                    let cq: Vec<Rational> = c.iter().map(|x| Rational::from_integer(x.clone())).collect();
                    if !base.is_empty() && span.contains_vec(&cq) {
                        continue;
                    }
                    let mut rows = base.clone();
                    rows.push(c.clone());
                    next.insert(saturate(&rows, r));
                }
            }
            frontier = next;
        }
        let mut best: Option<(Vec<IVec>, Rational)> = None;
        for s in frontier {
            let d = sub_gram(gram, &s).det()?;
            if best.as_ref().is_none_or(|(_, b)| d < *b) {
                best = Some((s, d));
            }
        }
        best.ok_or_else(|| Error::UnverifiedCertificate("no rank-k candidates within the search radius".into()))
    }

    /// Maximal destabilizing sublattice and its gram determinant.
    fn first_member(&self, gram: &QMat) -> Result<(Vec<IVec>, Rational)> {
        let r = gram.nrows();
        let mut best = self.min_det(gram, r)?;
        for k in (1..r).rev() {
            let cand = self.min_det(gram, k)?;
            if steeper(&cand.1, k, &best.1, best.0.len()) {
                best = cand;
            }
        }
        Ok(best)
    }

    fn flag(&self, gram: &QMat) -> Result<HnFlag> {
        let r = gram.nrows();
        let (s, det_s) = self.first_member(gram)?;
        let k = s.len();
        let mu = slope_of(&det_s, k)?;
        if k == r {
            return Ok(HnFlag {
                members: vec![hnf(&s)],
                slopes: vec![mu],
            });
        }
        let (s_basis, c) = complete_basis(&s, r);
        let g_ss = sub_gram(gram, &s_basis);
        let bs = to_qmat(&s_basis, r);
        let bc = to_qmat(&c, r);
        let g_cs = bc.transpose().mul(&gram.mul(&bs)?)?;
        let g_cc = sub_gram(gram, &c);
        let schur = g_cc.sub(&g_cs.mul(&g_ss.inverse()?)?.mul(&g_cs.transpose())?)?;
        let rest = self.flag(&schur)?;
        let mut members = vec![hnf(&s_basis)];
        for m in &rest.members {
            let mut rows = s_basis.clone();
            for y in m {
                let mut v = vec![BigInt::zero(); r];
                for (yi, ci) in y.iter().zip(&c) {
                    for (vj, cij) in v.iter_mut().zip(ci) {
                        *vj += yi * cij;
                    }
                }
                rows.push(v);
            }
            members.push(hnf(&saturate(&rows, r)));
        }
        let mut slopes = vec![mu];
        slopes.extend(rest.slopes);
        Ok(HnFlag { members, slopes })
    }
}

fn unit_ivec(r: usize, i: usize) -> IVec {
    let mut v = vec![BigInt::zero(); r];
    v[i] = BigInt::one();
    v
}

/// `-½ ln det / k`.
fn slope_of(det: &Rational, k: usize) -> Result<Real> {
    Ok(Real::ln_sqrt(det)?.scale(&rational(-1, k as i64)))
}

fn searcher(opts: &LatticeOptions) -> Searcher {
    Searcher {
        budget: opts.budget_nodes,
        kappa: opts.kappa.clone(),
    }
}

/// HN flag of a Euclidean lattice (any norm in rank 1).
pub fn hn_flag(l: &NormedLattice, opts: &LatticeOptions) -> Result<HnFlag> {
    if l.rank() == 1 {
        return Ok(HnFlag {
            members: vec![vec![unit_ivec(1, 0)]],
            slopes: vec![l.slope()?],
        });
    }
    match l.norm() {
        Norm::Euclidean { gram } => searcher(opts).flag(gram),
        _ => Err(Error::Unsupported("slopes of a non-Euclidean norm in rank > 1".into())),
    }
}

/// Degree, slope, `μ̂_max`, `μ̂_min` and the HN flag; `μ̂_min(L) = -μ̂_max(L^∨)` is checked.
pub fn slope_invariants(l: &NormedLattice, opts: &LatticeOptions) -> Result<SlopeInvariants> {
    let flag = hn_flag(l, opts)?;
    let mu_max = flag.slopes[0].clone();
    let mu_min = flag.slopes.last().expect("non-empty").clone();
    if l.rank() > 1 {
        let dual = l.dual()?;
        let gram = dual.gram().expect("Euclidean");
        let (s, d) = searcher(opts).first_member(gram)?;
        let dual_max = slope_of(&d, s.len())?;
        if dual_max != -mu_min.clone() {
            return Err(Error::UnverifiedCertificate(format!(
                "μ_min = {mu_min} but -μ_max of the dual = {}",
                -dual_max
            )));
        }
    }
    Ok(SlopeInvariants {
        degree: l.arakelov_degree()?,
        slope: l.slope()?,
        mu_max,
        mu_min,
        flag,
    })
}

/// `F^S`: the member at level `μ_i` is `E_i`.
pub fn slope_filtration(l: &NormedLattice, opts: &LatticeOptions) -> Result<FilteredSpace> {
    let flag = hn_flag(l, opts)?;
    slope_filtration_from(l.rank(), &flag)
}

pub(crate) fn slope_filtration_from(r: usize, flag: &HnFlag) -> Result<FilteredSpace> {
    let entries = flag
        .members
        .iter()
        .zip(&flag.slopes)
        .map(|(m, mu)| (mu.clone(), to_qmat(m, r)))
        .collect();
    FilteredSpace::new(r, entries)
}

/// Sum of `rank × slope` over the subquotients.
pub fn weighted_slope_sum(flag: &HnFlag) -> Real {
    let mut prev = 0;
    let mut total = Real::zero();
    for (m, mu) in flag.members.iter().zip(&flag.slopes) {
        let d = m.len() - prev;
        total = &total + &mu.scale(&rational(d as i64, 1));
        prev = m.len();
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intlat::ivec;

    fn inv(rows: &[Vec<i64>]) -> SlopeInvariants {
        slope_invariants(&NormedLattice::euclidean_i64(rows).unwrap(), &LatticeOptions::default()).unwrap()
    }

    #[test]
    fn identity_is_semistable() {
        let s = inv(&[vec![1, 0], vec![0, 1]]);
        assert_eq!(s.slope, Real::zero());
        assert_eq!(s.mu_max, Real::zero());
        assert_eq!(s.mu_min, Real::zero());
        assert!(s.flag.is_semistable());
    }

    #[test]
    fn diagonal_destabilizes() {
        let s = inv(&[vec![1, 0], vec![0, 4]]);
        assert_eq!(s.mu_max, Real::zero());
        assert_eq!(s.mu_min, -Real::ln_int(2));
        assert_eq!(s.flag.members[0], vec![ivec(&[1, 0])]);
        assert_eq!(s.flag.ranks(), vec![1, 2]);
        assert_eq!(weighted_slope_sum(&s.flag), s.degree);
    }

    #[test]
    fn rank_one_any_norm() {
        let l = NormedLattice::rank_one(rational(1, 2)).unwrap();
        let s = slope_invariants(&l, &LatticeOptions::default()).unwrap();
        assert_eq!(s.slope, Real::ln_int(2));
        assert_eq!(s.mu_max, Real::ln_int(2));
        assert_eq!(s.mu_min, Real::ln_int(2));
        assert!(slope_invariants(&NormedLattice::diagonal_max(vec![Real::zero(); 2]).unwrap(), &LatticeOptions::default()).is_err());
    }

    #[test]
    fn three_step_flag() {
        let s = inv(&[vec![1, 0, 0], vec![0, 9, 0], vec![0, 0, 100]]);
        assert_eq!(s.flag.ranks(), vec![1, 2, 3]);
        assert_eq!(s.flag.slopes, vec![Real::zero(), -Real::ln_int(3), -Real::ln_int(10)]);
        // a rank-2 destabilizer: the plane of the two short vectors
        let s = inv(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 50]]);
        assert_eq!(s.flag.ranks(), vec![2, 3]);
        assert_eq!(s.flag.members[0], vec![ivec(&[1, 0, 0]), ivec(&[0, 1, 0])]);
    }

    #[test]
    fn slope_filtration_examples() {
        let l = NormedLattice::euclidean_i64(&[vec![1, 0], vec![0, 4]]).unwrap();
        let f = slope_filtration(&l, &LatticeOptions::default()).unwrap();
        assert_eq!(f.levels(), vec![-Real::ln_int(2), Real::zero()]);
        let id = NormedLattice::euclidean_i64(&[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(slope_filtration(&id, &LatticeOptions::default()).unwrap().levels(), vec![Real::zero()]);
    }

    #[test]
    fn skewed_basis_matches_reduced() {
        // the same lattice as diag(1,4) written in the basis (1,0),(3,1)
        let s = inv(&[vec![1, 3], vec![3, 13]]);
        assert_eq!(s.mu_max, Real::zero());
        assert_eq!(s.mu_min, -Real::ln_int(2));
        assert_eq!(s.flag.members[0], vec![ivec(&[1, 0])]);
    }
}
