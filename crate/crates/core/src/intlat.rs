//! Integer lattice plumbing: Hermite normal form, saturation, unimodular completion.
//!
//! Sublattices of `ℤ^r` are given by integer vectors (rows). A sublattice is
//! saturated when it equals its rational span intersected with `ℤ^r`; saturated
//! sublattices are in bijection with rational subspaces.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::QMat;
use crate::real::Rational;

pub type IVec = Vec<BigInt>;

/// Result of unimodular column reduction of a `k × r` integer matrix `B`:
/// `B = [H | 0] · V` with `V` unimodular, `H` lower triangular of full column rank.
struct ColumnReduction {
    rank: usize,
    // rows of V
    v: Vec<IVec>,
    // columns of U = V^{-1}, stored as rows of Uᵀ
    u_t: Vec<IVec>,
}

fn column_reduce(rows: &[IVec], dim: usize) -> ColumnReduction {
    let mut b: Vec<IVec> = rows.to_vec();
    let mut v: Vec<IVec> = unit_rows(dim);
    let mut u_t: Vec<IVec> = unit_rows(dim);
    let mut p = 0;
    for r in 0..b.len() {
        if p == dim {
            break;
        }
        for j in p + 1..dim {
            if b[r][j].is_zero() {
                continue;
            }
            if b[r][p].is_zero() {
                swap_cols(&mut b, &mut v, &mut u_t, p, j);
                continue;
            }
            let (x, y, g) = ext_gcd(&b[r][p], &b[r][j]);
            let a_g = &b[r][p] / &g;
            let b_g = &b[r][j] / &g;
            // [col_p, col_j] <- [col_p, col_j] · [[x, -b/g], [y, a/g]]
            for row in b.iter_mut() {
                let cp = row[p].clone();
                let cj = row[j].clone();
                row[p] = &cp * &x + &cj * &y;
                row[j] = &cj * &a_g - &cp * &b_g;
            }
            // U gets the same column operation; Uᵀ rows p, j
            let up = u_t[p].clone();
            let uj = u_t[j].clone();
            u_t[p] = up.iter().zip(&uj).map(|(s, t)| s * &x + t * &y).collect();
            u_t[j] = up.iter().zip(&uj).map(|(s, t)| t * &a_g - s * &b_g).collect();
            // V <- M^{-1} V on rows p, j; M^{-1} = [[a/g, b/g], [-y, x]]
            let vp = v[p].clone();
            let vj = v[j].clone();
            v[p] = vp.iter().zip(&vj).map(|(s, t)| s * &a_g + t * &b_g).collect();
            v[j] = vp.iter().zip(&vj).map(|(s, t)| t * &x - s * &y).collect();
        }
        if !b[r][p].is_zero() {
            p += 1;
        }
    }
    ColumnReduction { rank: p, v, u_t }
}

fn swap_cols(b: &mut [IVec], v: &mut [IVec], u_t: &mut [IVec], i: usize, j: usize) {
    for row in b.iter_mut() {
        row.swap(i, j);
    }
    v.swap(i, j);
    u_t.swap(i, j);
}

fn unit_rows(dim: usize) -> Vec<IVec> {
    (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

/// `(x, y, g)` with `a·x + b·y = g = gcd(a, b) > 0`.
fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.x, -e.y, -e.gcd)
    } else {
        (e.x, e.y, e.gcd)
    }
}

/// Basis (rows) of the saturation of the lattice spanned by `rows`.
pub fn saturate(rows: &[IVec], dim: usize) -> Vec<IVec> {
    let red = column_reduce(rows, dim);
    hnf(&red.v[..red.rank])
}

/// Saturated basis of `rows` followed by vectors completing it to a basis of `ℤ^dim`.
pub fn complete_basis(rows: &[IVec], dim: usize) -> (Vec<IVec>, Vec<IVec>) {
    let red = column_reduce(rows, dim);
    (red.v[..red.rank].to_vec(), red.v[red.rank..].to_vec())
}

/// Basis of the integer kernel `{x ∈ ℤ^dim | ⟨row, x⟩ = 0 for every row}`.
pub fn integer_kernel(rows: &[IVec], dim: usize) -> Vec<IVec> {
    let red = column_reduce(rows, dim);
    red.u_t[red.rank..].to_vec()
}

/// Row Hermite normal form (upper echelon, positive pivots, reduced above pivots); zero rows dropped.
pub fn hnf(rows: &[IVec]) -> Vec<IVec> {
    let mut m: Vec<IVec> = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let dim = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..dim {
        if r == m.len() {
            break;
        }
        // smallest nonzero |entry| in column c at or below row r becomes the pivot
        while let Some(p) = (r..m.len())
            .filter(|&i| !m[i][c].is_zero())
            .min_by(|&i, &j| m[i][c].abs().cmp(&m[j][c].abs()))
        {
            m.swap(p, r);
            let mut done = true;
            for i in r + 1..m.len() {
                if m[i][c].is_zero() {
                    continue;
                }
                let q = m[i][c].div_floor(&m[r][c]);
                let pivot_row = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                    *x -= &q * y;
                }
                if !m[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if r < m.len() && !m[r][c].is_zero() {
            if m[r][c].is_negative() {
                for x in m[r].iter_mut() {
                    *x = -x.clone();
                }
            }
            for i in 0..r {
                let q = m[i][c].div_floor(&m[r][c]);
                if q.is_zero() {
                    continue;
                }
                let pivot_row = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                    *x -= &q * y;
                }
            }
            r += 1;
        }
    }
    m.truncate(r);
    m
}

/// Primitive integer vector on the line through `v` (gcd 1, same direction).
pub fn primitive(v: &[BigInt]) -> IVec {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

/// Integer vectors spanning the same rational line/space as rational columns (denominators cleared per vector).
pub fn integral_rows(m: &QMat) -> Vec<IVec> {
    m.cols()
        .iter()
        .map(|c| {
            let l = c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            let v: IVec = c.iter().map(|x| (x * Rational::from_integer(l.clone())).to_integer()).collect();
            primitive(&v)
        })
        .collect()
}

/// Rational matrix whose columns are the given integer vectors.
pub fn to_qmat(rows: &[IVec], dim: usize) -> QMat {
    let cols: Vec<Vec<Rational>> =
        rows.iter().map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect()).collect();
    QMat::from_cols(dim, &cols).expect("consistent dimension")
}

pub fn ivec(xs: &[i64]) -> IVec {
    xs.iter().map(|&x| BigInt::from(x)).collect()
}

/// Determinant of an integer square matrix given by rows.
pub fn det(rows: &[IVec]) -> Result<BigInt> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidParameter("determinant of a non-square matrix".into()));
    }
    let q = to_qmat(rows, n).transpose();
    Ok(q.det()?.to_integer())
}
