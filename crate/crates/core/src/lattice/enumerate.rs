//! Exact enumeration of short lattice vectors.
//!
//! Euclidean: Fincke–Pohst over the exact `LDLᵀ` factorization of the gram
//! matrix. The admissible interval for each coordinate is first estimated in
//! floating point and then corrected by exact rational tests at both ends,
//! so the enumerated set is exact. Max norms: box enumeration.

use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::QMat;
use crate::real::Rational;

/// Integer vector with its exact squared length (Euclidean) or norm (max norms).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShortVector {
    pub coords: Vec<i64>,
    pub value: Rational,
}

impl ShortVector {
    pub fn to_rational(&self) -> Vec<Rational> {
        self.coords.iter().map(|&x| Rational::from_integer(x.into())).collect()
    }
}

struct Search<'a> {
    l: &'a QMat,
    d: &'a [Rational],
    bound: &'a Rational,
    budget: u64,
    nodes: u64,
    half: bool,
    out: Vec<ShortVector>,
}

/// Non-zero `x ∈ ℤ^r` with `xᵀGx ≤ bound`; with `half`, one of each pair `±x`
/// (the one whose last non-zero coordinate is positive).
pub fn fincke_pohst(gram: &QMat, bound: &Rational, budget: u64, half: bool) -> Result<Vec<ShortVector>> {
    let r = gram.nrows();
    let (l, d) = gram
        .ldl()
        .filter(|(_, d)| d.iter().all(Signed::is_positive))
        .ok_or_else(|| Error::InvalidParameter("gram matrix is not positive definite".into()))?;
    let mut s = Search {
        l: &l,
        d: &d,
        bound,
        budget,
        nodes: 0,
        half,
        out: Vec::new(),
    };
    if r == 0 || bound.is_negative() {
        return Ok(Vec::new());
    }
    let mut x = vec![0i64; r];
    s.descend(r - 1, &mut x, Rational::zero(), true)?;
    Ok(s.out)
}

impl Search<'_> {
    fn descend(&mut self, i: usize, x: &mut Vec<i64>, partial: Rational, zero_above: bool) -> Result<()> {
        let r = x.len();
        let mut center = Rational::zero();
        for j in i + 1..r {
            if x[j] != 0 {
                center -= self.l.get(j, i) * Rational::from_integer(x[j].into());
            }
        }
        let room = self.bound - &partial;
        if room.is_negative() {
            return Ok(());
        }
        let di = &self.d[i];
        let fits = |k: i64| -> bool {
            let t = Rational::from_integer(k.into()) - &center;
            di * &t * &t <= room
        };
        let c = center.to_f64().unwrap_or(0.0);
        let s = (room.to_f64().unwrap_or(f64::MAX) / di.to_f64().unwrap_or(f64::MIN_POSITIVE)).sqrt();
        if !(c.abs() + s).is_finite() || c.abs() + s > 1e15 {
            return Err(Error::BudgetExhausted(self.budget));
        }
        let mut lo = (c - s).ceil() as i64;
        let mut hi = (c + s).floor() as i64;
        while fits(lo - 1) {
            lo -= 1;
        }
        while lo <= hi && !fits(lo) {
            lo += 1;
        }
        while fits(hi + 1) {
            hi += 1;
        }
        while hi >= lo && !fits(hi) {
            hi -= 1;
        }
        if zero_above && self.half {
            lo = lo.max(0);
        }
        for k in lo..=hi {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(Error::BudgetExhausted(self.budget));
            }
            x[i] = k;
            let t = Rational::from_integer(k.into()) - &center;
            let next = &partial + di * &t * &t;
            if i == 0 {
                if x.iter().any(|&v| v != 0) {
                    self.out.push(ShortVector {
                        coords: x.clone(),
                        value: next,
                    });
                }
            } else {
                self.descend(i - 1, x, next, zero_above && k == 0)?;
            }
        }
        x[i] = 0;
        Ok(())
    }
}

/// Number of `x ∈ ℤ^r` (zero included) with `xᵀGx ≤ bound`.
pub fn count_points(gram: &QMat, bound: &Rational, budget: u64) -> Result<u64> {
    if bound.is_negative() {
        return Ok(0);
    }
    Ok(1 + 2 * fincke_pohst(gram, bound, budget, true)?.len() as u64)
}

/// Coordinate bounds `|x_j| ≤ b_j` valid on `{x | max_i |⟨u_i, x⟩| ≤ bound}`.
fn polyhedral_box(functionals: &QMat, bound: &Rational) -> Result<Vec<i64>> {
    let r = functionals.ncols();
    let (_, pivots) = functionals.transpose().rref();
    if pivots.len() < r {
        return Err(Error::InvalidParameter("functionals must span the dual space".into()));
    }
    let rows: Vec<Vec<Rational>> = pivots.iter().map(|&i| functionals.row(i)).collect();
    let inv = QMat::from_rows(rows)?.inverse()?;
    (0..r)
        .map(|j| {
            let s: Rational = (0..r).map(|i| inv.get(j, i).abs()).fold(Rational::zero(), |a, b| a + b);
            (s * bound)
                .floor()
                .to_integer()
                .to_i64()
                .ok_or_else(|| Error::InvalidParameter("coordinate bound overflow".into()))
        })
        .collect()
}

/// Non-zero `x` with `max_i |⟨u_i, x⟩| ≤ bound`, value = that norm.
pub fn polyhedral_vectors(functionals: &QMat, bound: &Rational, budget: u64, half: bool) -> Result<Vec<ShortVector>> {
    let r = functionals.ncols();
    let b = polyhedral_box(functionals, bound)?;
    let size = b.iter().try_fold(1u64, |acc, &bj| acc.checked_mul(2 * bj as u64 + 1));
    match size {
        Some(s) if s <= budget => {}
        _ => return Err(Error::BudgetExhausted(budget)),
    }
    let mut out = Vec::new();
    let mut x: Vec<i64> = b.iter().map(|&bj| -bj).collect();
    loop {
        let last_nz = x.iter().rev().find(|&&v| v != 0);
        let keep = match last_nz {
            None => false,
            Some(&v) => !half || v > 0,
        };
        if keep {
            let xq: Vec<Rational> = x.iter().map(|&v| Rational::from_integer(v.into())).collect();
            let n = functionals.mul_vec(&xq)?.into_iter().map(|v| v.abs()).max().expect("non-empty");
            if n <= *bound {
                out.push(ShortVector {
                    coords: x.clone(),
                    value: n,
                });
            }
        }
        // odometer
        let mut j = 0;
        loop {
            if j == r {
                return Ok(out);
            }
            if x[j] < b[j] {
                x[j] += 1;
                break;
            }
            x[j] = -b[j];
            j += 1;
        }
    }
}
