//! Heights of homomorphisms between normed lattices over `ℚ`.
//!
//! `h(φ) = Σ_p ln ‖φ‖_p + ln ‖φ‖_∞`. With the standard integral structures the
//! finite part is `-ln content(M)`. The archimedean operator norm is exact
//! whenever the unit ball of the source is a rational polytope, or the target
//! norm is a maximum of rational functionals; Euclidean-to-Euclidean norms are
//! a generalized eigenvalue, enclosed by an exact positive-definiteness test
//! from above and an exact Rayleigh quotient from below.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::distortion::Enclosure;
use super::{Norm, NormedLattice};
use crate::error::{Error, Result};
use crate::linalg::QMat;
use crate::real::{rational_from_f64, Rational, Real};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Height {
    /// `Σ_p ln ‖φ‖_p`.
    pub finite: Real,
    /// `ln ‖φ‖_∞`.
    pub arch: Enclosure,
}

impl Height {
    pub fn total(&self) -> Enclosure {
        self.arch.add(&self.finite)
    }

    /// Sound upper bound, used in inequality audits.
    pub fn upper(&self) -> Real {
        &self.finite + &self.arch.hi
    }
}

/// `φ: src → dst` given by `map` (`dst.rank × src.rank`, rational).
pub fn height_of_map(src: &NormedLattice, dst: &NormedLattice, map: &QMat) -> Result<Height> {
    if map.ncols() != src.rank() {
        return Err(Error::DimensionMismatch { expected: src.rank(), got: map.ncols() });
    }
    if map.nrows() != dst.rank() {
        return Err(Error::DimensionMismatch { expected: dst.rank(), got: map.nrows() });
    }
    let content = content(map).ok_or_else(|| Error::InvalidParameter("height of the zero map".into()))?;
    Ok(Height {
        finite: -Real::ln(&content)?,
        arch: log_op_norm(src.norm(), dst.norm(), map)?,
    })
}

/// `gcd(numerators) / lcm(denominators)`; `None` for the zero matrix.
fn content(m: &QMat) -> Option<Rational> {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for q in m.entries() {
        if !q.is_zero() {
            num = num.gcd(q.numer());
            den = den.lcm(q.denom());
        }
    }
    (!num.is_zero()).then(|| Rational::new(num, den))
}

/// `ln sup_{x ≠ 0} ‖Mx‖_dst / ‖x‖_src`.
pub fn log_op_norm(src: &Norm, dst: &Norm, m: &QMat) -> Result<Enclosure> {
    match (src, dst) {
        (Norm::PolyhedralMax { functionals }, _) => {
            let mut best: Option<Real> = None;
            for v in polytope_vertices(functionals)? {
                let w = m.mul_vec(&v)?;
                if w.iter().all(Zero::is_zero) {
                    continue;
                }
                let val = log_norm_of(dst, &w)?;
                best = Some(match best {
                    None => val,
                    Some(b) => b.max(val),
                });
            }
            best.map(Enclosure::exact).ok_or_else(|| Error::InvalidParameter("operator norm of the zero map".into()))
        }
        (Norm::DiagonalMax { c }, _) => diagonal_source(c, dst, m),
        (Norm::Euclidean { gram }, Norm::Euclidean { gram: target }) => pencil(gram, target, m),
        (Norm::Euclidean { gram }, _) => {
            // sup over the ellipsoid of |⟨w, Mx⟩| is ‖Mᵀw‖ in the dual form G⁻¹
            let ginv = gram.inverse()?;
            let (rows, shifts): (Vec<Vec<Rational>>, Vec<Real>) = match dst {
                Norm::PolyhedralMax { functionals } => (functionals.rows_vec(), vec![Real::zero(); functionals.nrows()]),
                Norm::DiagonalMax { c } => {
                    let n = c.len();
                    let units = (0..n)
                        .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
                        .collect();
                    (units, c.iter().map(|x| -x.clone()).collect())
                }
                Norm::Euclidean { .. } => unreachable!(),
            };
            let mt = m.transpose();
            let mut best: Option<Real> = None;
            for (w, shift) in rows.iter().zip(shifts) {
                let y = mt.mul_vec(w)?;
                let q = ginv.quad_form(&y);
                if q.is_zero() {
                    continue;
                }
                let val = &Real::ln_sqrt(&q)? + &shift;
                best = Some(match best {
                    None => val,
                    Some(b) => b.max(val),
                });
            }
            best.map(Enclosure::exact).ok_or_else(|| Error::InvalidParameter("operator norm of the zero map".into()))
        }
    }
}

fn log_norm_of(norm: &Norm, w: &[Rational]) -> Result<Real> {
    match norm {
        Norm::Euclidean { gram } => Real::ln_sqrt(&gram.quad_form(w)),
        Norm::PolyhedralMax { functionals } => {
            Real::ln(&functionals.mul_vec(w)?.into_iter().map(|v| v.abs()).max().expect("non-empty"))
        }
        Norm::DiagonalMax { c } => {
            let mut best: Option<Real> = None;
            for (x, cj) in w.iter().zip(c) {
                if x.is_zero() {
                    continue;
                }
                let v = Real::ln(&x.abs())? - cj.clone();
                best = Some(match best {
                    None => v,
                    Some(b) => b.max(v),
                });
            }
            best.ok_or_else(|| Error::InvalidParameter("norm of the zero vector".into()))
        }
    }
}

/// Vertices of `{x | |⟨u_i, x⟩| ≤ 1}`, one of each pair `±v`.
fn polytope_vertices(functionals: &QMat) -> Result<Vec<Vec<Rational>>> {
    let (m, r) = (functionals.nrows(), functionals.ncols());
    let rows = functionals.rows_vec();
    let mut out: Vec<Vec<Rational>> = Vec::new();
    let mut subset: Vec<usize> = (0..r).collect();
    loop {
        let sub = QMat::from_rows(subset.iter().map(|&i| rows[i].clone()).collect())?;
        if sub.rank() == r {
            let inv = sub.inverse()?;
            for signs in 0..(1u64 << (r - 1)) {
                let s: Vec<Rational> = (0..r)
                    .map(|j| if j > 0 && signs >> (j - 1) & 1 == 1 { -Rational::one() } else { Rational::one() })
                    .collect();
                let x = inv.mul_vec(&s)?;
                let feasible = functionals.mul_vec(&x)?.iter().all(|v| v.abs() <= Rational::one());
                if feasible && !out.iter().any(|y| *y == x || y.iter().zip(&x).all(|(a, b)| *a == -b.clone())) {
                    out.push(x);
                }
            }
        }
        // next r-subset of 0..m in lexicographic order
        let mut i = r;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if subset[i] < m - r + i {
                subset[i] += 1;
                for j in i + 1..r {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Source unit ball is the box `|x_j| ≤ e^{c_j}`; its vertices are `D s`.
fn diagonal_source(c: &[Real], dst: &Norm, m: &QMat) -> Result<Enclosure> {
    let r = c.len();
    let signs = |k: u64| -> Vec<Rational> {
        (0..r)
            .map(|j| if j > 0 && k >> (j - 1) & 1 == 1 { -Rational::one() } else { Rational::one() })
            .collect()
    };
    if c.iter().all(|x| *x == c[0]) {
        let mut best: Option<Real> = None;
        for k in 0..(1u64 << (r - 1)) {
            let w = m.mul_vec(&signs(k))?;
            if w.iter().all(Zero::is_zero) {
                continue;
            }
            let val = log_norm_of(dst, &w)?;
            best = Some(match best {
                None => val,
                Some(b) => b.max(val),
            });
        }
        let best = best.ok_or_else(|| Error::InvalidParameter("operator norm of the zero map".into()))?;
        return Ok(Enclosure::exact(&best + &c[0]));
    }
    // unequal weights: the vertices are irrational; evaluate in floating point
    let mf = m.to_f64_rows();
    let cf: Vec<f64> = c.iter().map(Real::to_f64).collect();
    let mut best = f64::NEG_INFINITY;
    for k in 0..(1u64 << (r - 1)) {
        let x: Vec<f64> = (0..r)
            .map(|j| {
                let s = if j > 0 && k >> (j - 1) & 1 == 1 { -1.0 } else { 1.0 };
                s * cf[j].exp()
            })
            .collect();
        let w: Vec<f64> = mf.iter().map(|row| row.iter().zip(&x).map(|(a, b)| a * b).sum()).collect();
        best = best.max(log_norm_f64(dst, &w));
    }
    if !best.is_finite() {
        return Err(Error::UnverifiedCertificate("operator norm outside floating-point range".into()));
    }
    let pad = 1e-9 * (1.0 + best.abs());
    Ok(Enclosure {
        lo: Real::from_rational(rational_from_f64(best - pad)),
        hi: Real::from_rational(rational_from_f64(best + pad)),
    })
}

fn log_norm_f64(norm: &Norm, w: &[f64]) -> f64 {
    match norm {
        Norm::Euclidean { gram } => {
            let g = gram.to_f64_rows();
            let q: f64 = (0..w.len()).map(|i| (0..w.len()).map(|j| w[i] * g[i][j] * w[j]).sum::<f64>()).sum();
            0.5 * q.ln()
        }
        Norm::PolyhedralMax { functionals } => functionals
            .to_f64_rows()
            .iter()
            .map(|u| u.iter().zip(w).map(|(a, b)| a * b).sum::<f64>().abs().ln())
            .fold(f64::NEG_INFINITY, f64::max),
        Norm::DiagonalMax { c } => w
            .iter()
            .zip(c)
            .map(|(x, cj)| x.abs().ln() - cj.to_f64())
            .fold(f64::NEG_INFINITY, f64::max),
    }
}

/// Best rational approximation with denominator `≤ max_den` (continued fractions).
fn rationalize(x: f64, max_den: u64) -> Rational {
    let (mut h0, mut h1, mut k0, mut k1) = (0i128, 1i128, 1i128, 0i128);
    let mut y = x;
    for _ in 0..40 {
        let a = y.floor();
        if a.abs() > 1e15 {
            break;
        }
        let a = a as i128;
        let (h2, k2) = (a * h1 + h0, a * k1 + k0);
        if k2 > max_den as i128 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = y - a as f64;
        if frac.abs() < 1e-15 {
            break;
        }
        y = 1.0 / frac;
    }
    if k1 == 0 {
        return rational_from_f64(x);
    }
    Rational::new(BigInt::from(h1), BigInt::from(k1))
}

/// Every principal minor nonnegative.
fn is_positive_semidefinite(a: &QMat) -> Result<bool> {
    let n = a.nrows();
    for mask in 1u64..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let sub = QMat::from_rows(idx.iter().map(|&i| idx.iter().map(|&j| a.get(i, j).clone()).collect()).collect())?;
        if sub.det()?.is_negative() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `½ ln λ_max(A, G)` with `A = Mᵀ G_F M`.
fn pencil(g_src: &QMat, g_dst: &QMat, m: &QMat) -> Result<Enclosure> {
    let a = m.transpose().mul(&g_dst.mul(m)?)?;
    if a.entries().iter().all(Zero::is_zero) {
        return Err(Error::InvalidParameter("operator norm of the zero map".into()));
    }
    let n = a.nrows();
    let to_na = |q: &QMat| {
        let rows = q.to_f64_rows();
        DMatrix::from_fn(n, n, |i, j| rows[i][j])
    };
    let chol = to_na(g_src)
        .cholesky()
        .ok_or_else(|| Error::UnverifiedCertificate("floating-point Cholesky failed".into()))?;
    let linv = chol
        .l()
        .try_inverse()
        .ok_or_else(|| Error::UnverifiedCertificate("floating-point inverse failed".into()))?;
    let c = &linv * to_na(&a) * linv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let eig = c.symmetric_eigen();
    let (imax, lam) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    // eigenvector of the pencil: x = L⁻ᵀ y
    let y = eig.eigenvectors.column(imax).into_owned();
    let x = linv.transpose() * y;

    for den in [1u64, 12, 1000, 1_000_000] {
        let q = rationalize(lam, den);
        if q.is_positive() {
            let diff = g_src.scale(&q).sub(&a)?;
            if diff.det()?.is_zero() && is_positive_semidefinite(&diff)? {
                return Ok(Enclosure::exact(Real::ln_sqrt(&q)?));
            }
        }
    }

    let mut pad = 1e-12 * (1.0 + lam.abs());
    let hi = loop {
        let u = rational_from_f64(lam + pad);
        if g_src.scale(&u).sub(&a)?.is_positive_definite() {
            break u;
        }
        pad *= 16.0;
        if pad > 1.0 + lam.abs() {
            return Err(Error::UnverifiedCertificate("no certified upper bound for the operator norm".into()));
        }
    };
    let scale = x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let xq: Vec<Rational> = x.iter().map(|v| rationalize(v / scale, 1 << 40)).collect();
    let den = g_src.quad_form(&xq);
    let lo = if den.is_positive() {
        let r = a.quad_form(&xq) / den;
        if r.is_positive() {
            r
        } else {
            hi.clone()
        }
    } else {
        hi.clone()
    };
    let lo = lo.min(hi.clone());
    Ok(Enclosure {
        lo: Real::ln_sqrt(&lo)?,
        hi: Real::ln_sqrt(&hi)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::rational;

    #[test]
    fn rank_one_examples() {
        let one = NormedLattice::rank_one(rational(1, 1)).unwrap();
        let two = NormedLattice::rank_one(rational(2, 1)).unwrap();
        let id = QMat::identity(1);
        assert_eq!(height_of_map(&one, &two, &id).unwrap().total(), Enclosure::exact(Real::ln_int(2)));
        assert_eq!(height_of_map(&one, &one, &id).unwrap().total(), Enclosure::exact(Real::zero()));
        let half = QMat::from_rows(vec![vec![rational(1, 2)]]).unwrap();
        let h = height_of_map(&one, &one, &half).unwrap();
        assert_eq!(h.finite, Real::ln_int(2));
        assert_eq!(h.arch, Enclosure::exact(-Real::ln_int(2)));
        assert_eq!(h.total(), Enclosure::exact(Real::zero()));
    }

    #[test]
    fn zero_map_is_rejected() {
        let one = NormedLattice::rank_one(rational(1, 1)).unwrap();
        assert!(height_of_map(&one, &one, &QMat::zeros(1, 1)).is_err());
    }

    #[test]
    fn euclidean_exact_eigenvalue() {
        let e = NormedLattice::euclidean_i64(&[vec![1, 0], vec![0, 1]]).unwrap();
        let f = NormedLattice::euclidean_i64(&[vec![1, 0], vec![0, 4]]).unwrap();
        let h = height_of_map(&e, &f, &QMat::identity(2)).unwrap();
        assert_eq!(h.arch, Enclosure::exact(Real::ln_int(2)));
        // identity map between identical lattices
        let h = height_of_map(&f, &f, &QMat::identity(2)).unwrap();
        assert_eq!(h.total(), Enclosure::exact(Real::zero()));
    }

    #[test]
    fn euclidean_into_sup_norm() {
        let e = NormedLattice::euclidean_i64(&[vec![2, 0], vec![0, 8]]).unwrap();
        let m = NormedLattice::diagonal_max(vec![Real::zero(), Real::zero()]).unwrap();
        // sup |x_i| / ‖x‖ = max sqrt((G⁻¹)_ii) = 1/√2
        let h = height_of_map(&e, &m, &QMat::identity(2)).unwrap();
        assert_eq!(h.arch, Enclosure::exact(-Real::ln_sqrt(&rational(2, 1)).unwrap()));
    }

    #[test]
    fn unequal_diagonal_source_is_enclosed() {
        let s = NormedLattice::diagonal_max(vec![Real::zero(), Real::ln_int(3)]).unwrap();
        let t = NormedLattice::euclidean_i64(&[vec![1, 0], vec![0, 1]]).unwrap();
        let h = height_of_map(&s, &t, &QMat::identity(2)).unwrap();
        let want = 0.5 * 10f64.ln();
        assert!(h.arch.lo.to_f64() <= want && want <= h.arch.hi.to_f64());
    }

    #[test]
    fn vertices_of_cross_polytope() {
        let v = polytope_vertices(&QMat::from_i64_rows(&[vec![1, 1], vec![1, -1]])).unwrap();
        assert_eq!(v.len(), 2);
        let sq = polytope_vertices(&QMat::identity(3)).unwrap();
        assert_eq!(sq.len(), 4);
    }

    #[test]
    fn content_of_matrix() {
        let m = QMat::from_rows(vec![vec![rational(2, 3), rational(4, 9)]]).unwrap();
        assert_eq!(content(&m), Some(rational(2, 9)));
        assert_eq!(content(&QMat::zeros(2, 2)), None);
    }
}
