//! Successive minima, the minimum filtration, and `ĥ⁰`.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::enumerate::{count_points, fincke_pohst, polyhedral_vectors, ShortVector};
use super::{Norm, NormedLattice};
use crate::error::{Error, Result};
use crate::filtration::FilteredSpace;
use crate::linalg::QMat;
use crate::real::{Rational, Real};

/// Incrementally maintained echelon basis; answers "is `v` independent of what we have?".
#[derive(Clone, Debug, Default)]
pub(crate) struct Span {
    rows: Vec<(usize, Vec<Rational>)>,
}

impl Span {
    pub(crate) fn new() -> Self {
        Span::default()
    }

    pub(crate) fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &[Rational]) -> Vec<Rational> {
        let mut w = v.to_vec();
        for (p, row) in &self.rows {
            if !w[*p].is_zero() {
                let f = w[*p].clone();
                for (wi, ri) in w.iter_mut().zip(row) {
                    *wi -= &f * ri;
                }
            }
        }
        w
    }

    /// Adds `v` when it is independent; returns whether it was.
    pub(crate) fn insert(&mut self, v: &[Rational]) -> bool {
        let w = self.reduce(v);
        let Some(p) = w.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = w[p].recip();
        let w: Vec<Rational> = w.into_iter().map(|x| x * &inv).collect();
        for (_, row) in self.rows.iter_mut() {
            if !row[p].is_zero() {
                let f = row[p].clone();
                for (ri, wi) in row.iter_mut().zip(&w) {
                    *ri -= &f * wi;
                }
            }
        }
        self.rows.push((p, w));
        true
    }
}

/// `levels[i] = e_{i+1}` (non-increasing), realized by `vectors[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Minima {
    pub levels: Vec<Real>,
    pub vectors: Vec<Vec<Rational>>,
}

impl Minima {
    pub fn e_max(&self) -> &Real {
        &self.levels[0]
    }

    pub fn e_min(&self) -> &Real {
        self.levels.last().expect("rank ≥ 1")
    }
}

fn unit(r: usize, j: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); r];
    v[j] = Rational::one();
    v
}

/// Greedy independent selection from candidates sorted by increasing norm.
fn greedy(r: usize, mut cands: Vec<ShortVector>, level: impl Fn(&Rational) -> Result<Real>) -> Result<Minima> {
    cands.sort_by(|a, b| a.value.cmp(&b.value).then_with(|| a.coords.cmp(&b.coords)));
    let mut span = Span::new();
    let mut out = Minima {
        levels: Vec::with_capacity(r),
        vectors: Vec::with_capacity(r),
    };
    for c in cands {
        let v = c.to_rational();
        if span.insert(&v) {
            out.levels.push(level(&c.value)?);
            out.vectors.push(v);
            if span.rank() == r {
                return Ok(out);
            }
        }
    }
    Err(Error::Degenerate("short vectors do not span the lattice".into()))
}

/// Logarithmic successive minima `e_1 ≥ … ≥ e_r`, `e_i = -ln λ_i`.
pub fn successive_minima(l: &NormedLattice, budget: u64) -> Result<Minima> {
    let r = l.rank();
    match l.norm() {
        Norm::Euclidean { gram } => {
            // the basis vectors already span, so every minimum is ≤ max G_ii
            let bound = (0..r).map(|i| gram.get(i, i).clone()).max().expect("rank ≥ 1");
            let cands = fincke_pohst(gram, &bound, budget, true)?;
            greedy(r, cands, |q| Ok(-Real::ln_sqrt(q)?))
        }
        Norm::DiagonalMax { c } => {
            let mut idx: Vec<usize> = (0..r).collect();
            let mut err = None;
            idx.sort_by(|&a, &b| {
                c[b].try_cmp(&c[a]).unwrap_or_else(|e| {
                    err = Some(e);
                    std::cmp::Ordering::Equal
                })
            });
            if let Some(e) = err {
                return Err(e);
            }
            Ok(Minima {
                levels: idx.iter().map(|&j| c[j].clone()).collect(),
                vectors: idx.iter().map(|&j| unit(r, j)).collect(),
            })
        }
        Norm::PolyhedralMax { functionals } => {
            let bound = (0..r)
                .map(|j| functionals.col(j).into_iter().map(|v| num_traits::Signed::abs(&v)).max().expect("non-empty"))
                .max()
                .expect("rank ≥ 1");
            let cands = polyhedral_vectors(functionals, &bound, budget, true)?;
            greedy(r, cands, |q| Ok(-Real::ln(q)?))
        }
    }
}

/// `F^M_t = span{x | ‖x‖ ≤ e^{-t}}`: jumps exactly at the distinct minima.
pub fn minimum_filtration(l: &NormedLattice, budget: u64) -> Result<FilteredSpace> {
    let m = successive_minima(l, budget)?;
    minimum_filtration_from(l.rank(), &m)
}

pub(crate) fn minimum_filtration_from(r: usize, m: &Minima) -> Result<FilteredSpace> {
    // F at level e_i is spanned by the vectors realizing e_1, …, e_k for the last k with e_k = e_i
    let mut entries = Vec::new();
    let mut i = 0;
    while i < r {
        let mut k = i;
        while k + 1 < r && m.levels[k + 1] == m.levels[i] {
            k += 1;
        }
        entries.push((m.levels[i].clone(), QMat::from_cols(r, &m.vectors[..=k])?));
        i = k + 1;
    }
    FilteredSpace::new(r, entries)
}

/// `ĥ⁰ = ln #{x ∈ ℤ^r | ‖x‖ ≤ 1}`.
pub fn h0(l: &NormedLattice, budget: u64) -> Result<Real> {
    match l.norm() {
        Norm::Euclidean { gram } => Ok(Real::ln_int(count_points(gram, &Rational::one(), budget)?)),
        Norm::DiagonalMax { c } => {
            let mut total = Real::zero();
            for cj in c {
                let n: BigUint = cj.floor_exp()? * 2u32 + 1u32;
                total = &total + &Real::ln(&Rational::from_integer(n.into()))?;
            }
            Ok(total)
        }
        Norm::PolyhedralMax { functionals } => {
            let n = polyhedral_vectors(functionals, &Rational::one(), budget, true)?.len() as u64;
            Ok(Real::ln_int(1 + 2 * n))
        }
    }
}
