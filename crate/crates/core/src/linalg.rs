//! Exact linear algebra over the rationals.
//!
//! Ranks and determinants go through fraction-free (Bareiss) elimination on
//! integer matrices obtained by clearing row denominators; kernels and
//! coordinates use rational row reduction. Nothing here touches floating point.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::real::{format_rational, Rational};

/// Dense rational matrix, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct QMat {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl fmt::Debug for QMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| format_rational(self.get(i, j))).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl QMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMat {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidParameter("ragged matrix rows".into()));
        }
        Ok(QMat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Matrix whose columns are the given vectors (all of length `dim`).
    pub fn from_cols(dim: usize, cols: &[Vec<Rational>]) -> Result<Self> {
        let mut m = QMat::zeros(dim, cols.len());
        for (j, col) in cols.iter().enumerate() {
            if col.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: col.len() });
            }
            for (i, x) in col.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        Ok(m)
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        QMat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect())
                .collect(),
        )
        .expect("rectangular")
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<Rational> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn cols(&self) -> Vec<Vec<Rational>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn rows_vec(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> QMat {
        let mut t = QMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &QMat) -> Result<QMat> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        let mut out = QMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + a * b;
                        out.set(i, j, v);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, got: v.len() });
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &v[j]).fold(Rational::zero(), |a, b| a + b))
            .collect())
    }

    /// `[self | other]`.
    pub fn hcat(&self, other: &QMat) -> Result<QMat> {
        if self.rows != other.rows && self.cols > 0 && other.cols > 0 {
            return Err(Error::DimensionMismatch { expected: self.rows, got: other.rows });
        }
        let rows = self.rows.max(other.rows);
        let mut out = QMat::zeros(rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        Ok(out)
    }

    pub fn select_cols(&self, idx: &[usize]) -> QMat {
        let mut out = QMat::zeros(self.rows, idx.len());
        for (jj, &j) in idx.iter().enumerate() {
            for i in 0..self.rows {
                out.set(i, jj, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Integer matrix with the same row space: each row multiplied by the lcm of its denominators.
    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                row.iter().map(|x| (x * Rational::from_integer(l.clone())).to_integer()).collect()
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        bareiss_rank(self.integer_rows(), self.cols)
    }

    pub fn det(&self) -> Result<Rational> {
        if !self.is_square() {
            return Err(Error::InvalidParameter("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Rational::one());
        }
        let mut scale = BigInt::one();
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            rows.push(row.iter().map(|x| (x * Rational::from_integer(l.clone())).to_integer()).collect());
            scale *= l;
        }
        Ok(Rational::new(bareiss_det(rows), scale))
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (QMat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(p, r);
            let inv = m.get(r, c).recip();
            for j in c..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let v = m.get(i, j) - &f * m.get(r, j);
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Basis of the kernel `{x | self·x = 0}`, as columns.
    pub fn kernel(&self) -> QMat {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut k = QMat::zeros(self.cols, free.len());
        for (jj, &f) in free.iter().enumerate() {
            k.set(f, jj, Rational::one());
            for (pi, &pc) in pivots.iter().enumerate() {
                k.set(pc, jj, -r.get(pi, f).clone());
            }
        }
        k
    }

    /// Columns forming a basis of the column space (a subset of the original columns).
    pub fn column_basis(&self) -> QMat {
        let (_, pivots) = self.rref();
        self.select_cols(&pivots)
    }

    pub fn has_full_column_rank(&self) -> bool {
        self.rank() == self.cols
    }

    /// Whether every column of `other` lies in the column space of `self`.
    pub fn spans(&self, other: &QMat) -> bool {
        if other.cols == 0 {
            return true;
        }
        let r = self.rank();
        self.hcat(other).map(|m| m.rank() == r).unwrap_or(false)
    }

    pub fn contains_vec(&self, v: &[Rational]) -> bool {
        if v.iter().all(Zero::is_zero) {
            return true;
        }
        if self.cols == 0 {
            return false;
        }
        let col = QMat::from_cols(v.len(), &[v.to_vec()]).expect("column");
        self.spans(&col)
    }

    /// Basis of the intersection of the column spaces of `self` and `other`.
    pub fn intersect(&self, other: &QMat) -> Result<QMat> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, got: other.rows });
        }
        if self.cols == 0 || other.cols == 0 {
            return Ok(QMat::zeros(self.rows, 0));
        }
        let a = self.column_basis();
        let b = other.column_basis();
        let mut neg_b = b.clone();
        for x in neg_b.data.iter_mut() {
            *x = -x.clone();
        }
        let k = a.hcat(&neg_b)?.kernel();
        // first a.cols coordinates give combinations of a
        let top = QMat {
            rows: a.cols,
            cols: k.cols,
            data: (0..a.cols).flat_map(|i| k.row(i)).collect(),
        };
        Ok(a.mul(&top)?.column_basis())
    }

    /// Coordinates `x` with `self·x = v`, for `self` of full column rank.
    pub fn solve(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, got: v.len() });
        }
        let aug = self.hcat(&QMat::from_cols(self.rows, &[v.to_vec()])?)?;
        let (r, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return Err(Error::InvalidParameter("vector not in the column space".into()));
        }
        if pivots.len() != self.cols {
            return Err(Error::RankDeficient);
        }
        Ok((0..self.cols).map(|i| r.get(i, self.cols).clone()).collect())
    }

    /// Solve for every column of `rhs`.
    pub fn solve_cols(&self, rhs: &QMat) -> Result<QMat> {
        let cols: Result<Vec<Vec<Rational>>> = rhs.cols().iter().map(|c| self.solve(c)).collect();
        QMat::from_cols(self.cols, &cols?)
    }

    pub fn inverse(&self) -> Result<QMat> {
        if !self.is_square() {
            return Err(Error::InvalidParameter("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let (r, pivots) = self.hcat(&QMat::identity(n))?.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::RankDeficient);
        }
        let mut inv = QMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j).clone());
            }
        }
        Ok(inv)
    }

    /// Indices of standard basis vectors completing the column space to the whole space,
    /// chosen greedily in index order.
    pub fn standard_complement(&self) -> Vec<usize> {
        let n = self.rows;
        let mut current = self.column_basis();
        let mut chosen = Vec::new();
        for j in 0..n {
            if current.cols == n {
                break;
            }
            let mut e = vec![Rational::zero(); n];
            e[j] = Rational::one();
            if !current.contains_vec(&e) {
                current = current.hcat(&QMat::from_cols(n, &[e]).expect("column")).expect("same rows");
                chosen.push(j);
            }
        }
        chosen
    }

    /// Exact positive-definiteness test (all leading principal minors positive).
    pub fn is_positive_definite(&self) -> bool {
        if !self.is_symmetric() {
            return false;
        }
        self.ldl().map(|(_, d)| d.iter().all(Signed::is_positive)).unwrap_or(false)
    }

    /// `self = L·diag(d)·Lᵀ` with unit lower-triangular `L`; fails on a zero pivot.
    pub fn ldl(&self) -> Option<(QMat, Vec<Rational>)> {
        let n = self.rows;
        let mut l = QMat::identity(n);
        let mut d: Vec<Rational> = Vec::with_capacity(n);
        for j in 0..n {
            let mut dj = self.get(j, j).clone();
            for k in 0..j {
                let ljk = l.get(j, k);
                dj -= ljk * ljk * &d[k];
            }
            if dj.is_zero() {
                return None;
            }
            for i in j + 1..n {
                let mut v = self.get(i, j).clone();
                for k in 0..j {
                    v -= l.get(i, k) * l.get(j, k) * &d[k];
                }
                l.set(i, j, v / &dj);
            }
            d.push(dj);
        }
        Some((l, d))
    }

    /// `vᵀ·self·v`.
    pub fn quad_form(&self, v: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for i in 0..self.rows {
            if v[i].is_zero() {
                continue;
            }
            let mut s = Rational::zero();
            for j in 0..self.cols {
                if !v[j].is_zero() {
                    s += self.get(i, j) * &v[j];
                }
            }
            acc += &v[i] * s;
        }
        acc
    }

    pub fn scale(&self, c: &Rational) -> QMat {
        QMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn sub(&self, other: &QMat) -> Result<QMat> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch { expected: self.rows, got: other.rows });
        }
        Ok(QMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn entries(&self) -> &[Rational] {
        &self.data
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        use num_traits::ToPrimitive;
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).to_f64().unwrap_or(f64::NAN)).collect())
            .collect()
    }
}

fn bareiss_rank(mut m: Vec<Vec<BigInt>>, cols: usize) -> usize {
    let rows = m.len();
    let mut rank = 0;
    let mut prev = BigInt::one();
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(p, rank);
        for i in rank + 1..rows {
            for j in c + 1..cols {
                let v = (&m[rank][c] * &m[i][j] - &m[i][c] * &m[rank][j]) / &prev;
                m[i][j] = v;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[rank][c].clone();
        rank += 1;
    }
    rank
}

fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[k][k] * &m[i][j] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

pub fn qvec(xs: &[i64]) -> Vec<Rational> {
    xs.iter().map(|&x| Rational::from_integer(x.into())).collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).fold(Rational::zero(), |s, t| s + t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::rational;

    #[test]
    fn rank_and_det() {
        let m = QMat::from_i64_rows(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]]);
        assert_eq!(m.rank(), 2);
        assert_eq!(m.det().unwrap(), rational(0, 1));
        let g = QMat::from_i64_rows(&[vec![2, 1], vec![1, 3]]);
        assert_eq!(g.det().unwrap(), rational(5, 1));
        let mut h = g.clone();
        h.set(0, 1, rational(1, 2));
        h.set(1, 0, rational(1, 2));
        assert_eq!(h.det().unwrap(), rational(23, 4));
        let p = QMat::from_i64_rows(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(p.det().unwrap(), rational(-1, 1));
    }

    #[test]
    fn kernel_and_intersection() {
        let m = QMat::from_i64_rows(&[vec![1, 1, 0], vec![0, 1, 1]]);
        let k = m.kernel();
        assert_eq!(k.ncols(), 1);
        assert!(m.mul(&k).unwrap().entries().iter().all(Zero::is_zero));
        // span(e1,e2) ∩ span(e2,e3) = span(e2)
        let a = QMat::from_cols(3, &[qvec(&[1, 0, 0]), qvec(&[0, 1, 0])]).unwrap();
        let b = QMat::from_cols(3, &[qvec(&[0, 1, 0]), qvec(&[0, 0, 1])]).unwrap();
        let i = a.intersect(&b).unwrap();
        assert_eq!(i.ncols(), 1);
        assert!(i.contains_vec(&qvec(&[0, 1, 0])));
    }

    #[test]
    fn solve_inverse_complement() {
        let a = QMat::from_cols(3, &[qvec(&[1, 1, 0]), qvec(&[0, 1, 1])]).unwrap();
        let x = a.solve(&qvec(&[2, 5, 3])).unwrap();
        assert_eq!(x, qvec(&[2, 3]));
        assert!(a.solve(&qvec(&[1, 0, 0])).is_err());
        let g = QMat::from_i64_rows(&[vec![2, 1], vec![1, 3]]);
        let gi = g.inverse().unwrap();
        assert_eq!(g.mul(&gi).unwrap(), QMat::identity(2));
        assert_eq!(a.standard_complement(), vec![0]);
    }

    #[test]
    fn positive_definite() {
        assert!(QMat::from_i64_rows(&[vec![2, 1], vec![1, 2]]).is_positive_definite());
        assert!(!QMat::from_i64_rows(&[vec![1, 2], vec![2, 1]]).is_positive_definite());
        assert!(!QMat::from_i64_rows(&[vec![1, 1], vec![1, 1]]).is_positive_definite());
        let g = QMat::from_i64_rows(&[vec![4, 2, 1], vec![2, 5, 3], vec![1, 3, 6]]);
        let (l, d) = g.ldl().unwrap();
        let dm = {
            let mut m = QMat::zeros(3, 3);
            for (i, x) in d.iter().enumerate() {
                m.set(i, i, x.clone());
            }
            m
        };
        assert_eq!(l.mul(&dm).unwrap().mul(&l.transpose()).unwrap(), g);
    }
}
