//! Distortion `D(g, g') = sup_x |ln ‖x‖ - ln ‖x‖'|` between two norms on one lattice.

use std::fmt;

use super::height::log_op_norm;
use super::{Norm, NormedLattice};
use crate::error::{Error, Result};
use crate::linalg::QMat;
use crate::real::Real;

/// Certified interval `[lo, hi]`; a point when `lo == hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: Real,
    pub hi: Real,
}

impl Enclosure {
    pub fn exact(v: Real) -> Self {
        Enclosure { lo: v.clone(), hi: v }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn max(self, other: Enclosure) -> Enclosure {
        Enclosure {
            lo: self.lo.max(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn add(&self, v: &Real) -> Enclosure {
        Enclosure {
            lo: &self.lo + v,
            hi: &self.hi + v,
        }
    }

    pub fn midpoint_f64(&self) -> f64 {
        0.5 * (self.lo.to_f64() + self.hi.to_f64())
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "[{}, {}]", self.lo, self.hi)
        }
    }
}

/// Both norms live on the same `ℤ^r`.
pub fn distortion(a: &NormedLattice, b: &NormedLattice) -> Result<Enclosure> {
    let r = a.rank();
    if b.rank() != r {
        return Err(Error::DimensionMismatch { expected: r, got: b.rank() });
    }
    if let (Norm::DiagonalMax { c }, Norm::DiagonalMax { c: d }) = (a.norm(), b.norm()) {
        let v = c
            .iter()
            .zip(d)
            .map(|(x, y)| (x - y).abs())
            .reduce(Real::max)
            .expect("rank ≥ 1");
        return Ok(Enclosure::exact(v));
    }
    let id = QMat::identity(r);
    let ab = log_op_norm(b.norm(), a.norm(), &id)?;
    let ba = log_op_norm(a.norm(), b.norm(), &id)?;
    Ok(ab.max(ba))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::rational;

    #[test]
    fn examples() {
        let a = NormedLattice::diagonal_max(vec![Real::zero(), Real::from_int(2)]).unwrap();
        let b = NormedLattice::diagonal_max(vec![Real::from_int(1), Real::from_int(1)]).unwrap();
        assert_eq!(distortion(&a, &b).unwrap(), Enclosure::exact(Real::from_int(1)));
        assert_eq!(distortion(&a, &a).unwrap(), Enclosure::exact(Real::zero()));
        let e = NormedLattice::euclidean_i64(&[vec![1, 0], vec![0, 1]]).unwrap();
        let m = NormedLattice::diagonal_max(vec![Real::zero(), Real::zero()]).unwrap();
        assert_eq!(distortion(&e, &m).unwrap(), Enclosure::exact(Real::ln_sqrt(&rational(2, 1)).unwrap()));
        assert_eq!(distortion(&e, &e).unwrap(), Enclosure::exact(Real::zero()));
    }

    #[test]
    fn euclidean_pair_is_certified() {
        let a = NormedLattice::euclidean_i64(&[vec![2, 1], vec![1, 3]]).unwrap();
        let b = NormedLattice::euclidean_i64(&[vec![1, 0], vec![0, 1]]).unwrap();
        let d = distortion(&a, &b).unwrap();
        // eigenvalues of [[2,1],[1,3]] are (5 ± √5)/2
        let want = 0.5 * ((5.0 + 5f64.sqrt()) / 2.0).ln();
        assert!(d.lo.to_f64() <= want + 1e-12 && want <= d.hi.to_f64() + 1e-12);
        assert!(d.hi.to_f64() - d.lo.to_f64() < 1e-6);
    }

    #[test]
    fn polyhedral_vs_diagonal() {
        // ‖x‖ = max(|x1+x2|, |x1-x2|) versus the sup norm: ratio between 1 and 2
        let p = NormedLattice::polyhedral_max(QMat::from_i64_rows(&[vec![1, 1], vec![1, -1]])).unwrap();
        let m = NormedLattice::diagonal_max(vec![Real::zero(), Real::zero()]).unwrap();
        assert_eq!(distortion(&p, &m).unwrap(), Enclosure::exact(Real::ln_int(2)));
    }
}
