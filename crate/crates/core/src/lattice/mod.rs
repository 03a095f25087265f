//! Normed integer lattices `ℤ^r` with Euclidean, weighted max, or polyhedral max norms.
//!
//! Every level is an exact [`Real`]: Euclidean quantities are `-½ ln` of a
//! rational squared length, max-norm quantities are `-ln` of a rational or a
//! rational shifted by a weight.

pub mod audit;
pub mod distortion;
pub mod enumerate;
pub mod height;
pub mod hn;
pub mod minima;

use serde::{Deserialize, Serialize};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::QMat;
use crate::real::{format_rational, parse_decimal, parse_rational, rational, rational_from_f64, Rational, Real};

pub use audit::{audit_inequalities, Companion};
pub use distortion::{distortion, Enclosure};
pub use height::{height_of_map, log_op_norm, Height};
pub use hn::{hn_flag, slope_filtration, slope_invariants, weighted_slope_sum, HnFlag, SlopeInvariants};
pub use minima::{h0, minimum_filtration, successive_minima, Minima};

/// Default enumeration budget (nodes of the search tree).
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// `(δ_K, log|Δ_K|)`; only `(1, 0)` describes an actual base field here.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseField {
    pub delta: u32,
    pub log_disc: Real,
}

impl Default for BaseField {
    fn default() -> Self {
        BaseField::rationals()
    }
}

impl BaseField {
    pub fn rationals() -> Self {
        BaseField {
            delta: 1,
            log_disc: Real::zero(),
        }
    }

    pub fn new(delta: u32, log_disc: Real) -> Result<Self> {
        if delta == 0 {
            return Err(Error::InvalidParameter("field degree must be positive".into()));
        }
        if log_disc.try_signum()? == std::cmp::Ordering::Less {
            return Err(Error::InvalidParameter("log|Δ_K| must be nonnegative".into()));
        }
        if delta == 1 && !log_disc.is_zero() {
            return Err(Error::InvalidParameter("log|Δ_K| must vanish for δ_K = 1".into()));
        }
        Ok(BaseField { delta, log_disc })
    }

    pub fn delta_rational(&self) -> Rational {
        rational(self.delta as i64, 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Norm {
    /// `‖x‖² = xᵀ G x`.
    Euclidean { gram: QMat },
    /// `‖x‖ = max_j e^{-c_j} |x_j|`.
    DiagonalMax { c: Vec<Real> },
    /// `‖x‖ = max_i |⟨u_i, x⟩|`, functionals as rows.
    PolyhedralMax { functionals: QMat },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormedLattice {
    rank: usize,
    norm: Norm,
    base: BaseField,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeOptions {
    pub budget_nodes: u64,
    /// When set, destabilizing sublattices are searched among vectors of squared
    /// length `≤ κ² λ_r²` instead of the Hermite-constant radius.
    pub kappa: Option<Rational>,
}

impl Default for LatticeOptions {
    fn default() -> Self {
        LatticeOptions {
            budget_nodes: DEFAULT_BUDGET,
            kappa: None,
        }
    }
}

impl NormedLattice {
    pub fn new(norm: Norm, base: BaseField) -> Result<Self> {
        let rank = match &norm {
            Norm::Euclidean { gram } => {
                if !gram.is_square() || gram.nrows() == 0 {
                    return Err(Error::InvalidParameter("gram matrix must be square and non-empty".into()));
                }
                if !gram.is_positive_definite() {
                    return Err(Error::InvalidParameter("gram matrix is not positive definite".into()));
                }
                gram.nrows()
            }
            Norm::DiagonalMax { c } => {
                if c.is_empty() {
                    return Err(Error::InvalidParameter("empty weight list".into()));
                }
                c.len()
            }
            Norm::PolyhedralMax { functionals } => {
                let r = functionals.ncols();
                if r == 0 || functionals.rank() != r {
                    return Err(Error::InvalidParameter("functionals must span the dual space".into()));
                }
                r
            }
        };
        Ok(NormedLattice { rank, norm, base })
    }

    pub fn euclidean(gram: QMat) -> Result<Self> {
        NormedLattice::new(Norm::Euclidean { gram }, BaseField::rationals())
    }

    pub fn euclidean_i64(rows: &[Vec<i64>]) -> Result<Self> {
        NormedLattice::euclidean(QMat::from_i64_rows(rows))
    }

    pub fn diagonal_max(c: Vec<Real>) -> Result<Self> {
        NormedLattice::new(Norm::DiagonalMax { c }, BaseField::rationals())
    }

    pub fn polyhedral_max(functionals: QMat) -> Result<Self> {
        NormedLattice::new(Norm::PolyhedralMax { functionals }, BaseField::rationals())
    }

    /// `ℤ` with `‖1‖ = a`.
    pub fn rank_one(a: Rational) -> Result<Self> {
        if !a.is_positive() {
            return Err(Error::InvalidParameter("norm of the generator must be positive".into()));
        }
        NormedLattice::polyhedral_max(QMat::from_rows(vec![vec![a]])?)
    }

    pub fn with_base(mut self, base: BaseField) -> Self {
        self.base = base;
        self
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn norm(&self) -> &Norm {
        &self.norm
    }

    pub fn base(&self) -> &BaseField {
        &self.base
    }

    pub fn gram(&self) -> Option<&QMat> {
        match &self.norm {
            Norm::Euclidean { gram } => Some(gram),
            _ => None,
        }
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self.norm, Norm::Euclidean { .. })
    }

    /// `ln ‖x‖` for a non-zero rational vector.
    pub fn log_norm(&self, x: &[Rational]) -> Result<Real> {
        if x.len() != self.rank {
            return Err(Error::DimensionMismatch { expected: self.rank, got: x.len() });
        }
        if x.iter().all(Zero::is_zero) {
            return Err(Error::InvalidParameter("norm of the zero vector has no logarithm".into()));
        }
        match &self.norm {
            Norm::Euclidean { gram } => Real::ln_sqrt(&gram.quad_form(x)),
            Norm::PolyhedralMax { functionals } => {
                let m = functionals.mul_vec(x)?.into_iter().map(|v| v.abs()).max().expect("non-empty");
                Real::ln(&m)
            }
            Norm::DiagonalMax { c } => {
                let mut best: Option<Real> = None;
                for (xj, cj) in x.iter().zip(c) {
                    if xj.is_zero() {
                        continue;
                    }
                    let v = Real::ln(&xj.abs())? - cj.clone();
                    best = Some(match best {
                        None => v,
                        Some(b) => b.max(v),
                    });
                }
                Ok(best.expect("non-zero vector"))
            }
        }
    }

    /// `deĝ = -δ_K ln covol` for Euclidean norms, `-δ_K ln ‖generator‖` in rank 1.
    pub fn arakelov_degree(&self) -> Result<Real> {
        let delta = self.base.delta_rational();
        match &self.norm {
            Norm::Euclidean { gram } => Ok(Real::ln_sqrt(&gram.det()?)?.scale(&-delta)),
            _ if self.rank == 1 => Ok(self.log_norm(&[Rational::one()])?.scale(&-delta)),
            _ => Err(Error::Unsupported("Arakelov degree of a non-Euclidean norm in rank > 1".into())),
        }
    }

    /// `deĝ / (δ_K r)`.
    pub fn slope(&self) -> Result<Real> {
        Ok(self
            .arakelov_degree()?
            .scale(&Rational::new(1.into(), BigInt::from(self.base.delta as u64 * self.rank as u64))))
    }

    /// Euclidean: inverse gram; rank 1: inverse generator norm.
    pub fn dual(&self) -> Result<NormedLattice> {
        match &self.norm {
            Norm::Euclidean { gram } => Ok(NormedLattice {
                rank: self.rank,
                norm: Norm::Euclidean { gram: gram.inverse()? },
                base: self.base.clone(),
            }),
            Norm::DiagonalMax { c } if self.rank == 1 => Ok(NormedLattice {
                rank: 1,
                norm: Norm::DiagonalMax { c: vec![-c[0].clone()] },
                base: self.base.clone(),
            }),
            Norm::PolyhedralMax { functionals } if self.rank == 1 => {
                let m = functionals.col(0).into_iter().map(|v| v.abs()).max().expect("non-empty");
                Ok(NormedLattice {
                    rank: 1,
                    norm: Norm::PolyhedralMax {
                        functionals: QMat::from_rows(vec![vec![m.recip()]])?,
                    },
                    base: self.base.clone(),
                })
            }
            _ => Err(Error::Unsupported("dual of a non-Euclidean norm in rank > 1".into())),
        }
    }

    pub fn to_json(&self) -> LatticeJson {
        let mat = |m: &QMat| m.rows_vec().iter().map(|r| r.iter().map(format_rational).collect()).collect();
        LatticeJson {
            rank: self.rank,
            norm: match &self.norm {
                Norm::Euclidean { gram } => NormJson::Euclidean { gram: mat(gram) },
                Norm::DiagonalMax { c } => NormJson::Diagmax {
                    c: c.iter().map(Real::to_decimal_string).collect(),
                },
                Norm::PolyhedralMax { functionals } => NormJson::Polymax {
                    functionals: mat(functionals),
                },
            },
            base: BaseJson {
                delta: self.base.delta,
                log_disc: NumOrString::Num(self.base.log_disc.to_f64()),
            },
        }
    }

    pub fn from_json(j: &LatticeJson) -> Result<Self> {
        let mat = |rows: &Vec<Vec<String>>| -> Result<QMat> {
            QMat::from_rows(
                rows.iter()
                    .map(|r| r.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?,
            )
        };
        let norm = match &j.norm {
            NormJson::Euclidean { gram } => Norm::Euclidean { gram: mat(gram)? },
            NormJson::Diagmax { c } => Norm::DiagonalMax {
                c: c.iter().map(|s| parse_decimal(s).map(Real::from_rational)).collect::<Result<_>>()?,
            },
            NormJson::Polymax { functionals } => Norm::PolyhedralMax {
                functionals: mat(functionals)?,
            },
        };
        let base = BaseField::new(j.base.delta, Real::from_rational(j.base.log_disc.to_rational()?))?;
        let l = NormedLattice::new(norm, base)?;
        if l.rank != j.rank {
            return Err(Error::DimensionMismatch { expected: j.rank, got: l.rank });
        }
        Ok(l)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LatticeJson {
    pub rank: usize,
    pub norm: NormJson,
    #[serde(default)]
    pub base: BaseJson,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum NormJson {
    Euclidean { gram: Vec<Vec<String>> },
    Diagmax { c: Vec<String> },
    Polymax { functionals: Vec<Vec<String>> },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BaseJson {
    pub delta: u32,
    pub log_disc: NumOrString,
}

impl Default for BaseJson {
    fn default() -> Self {
        BaseJson {
            delta: 1,
            log_disc: NumOrString::Num(0.0),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum NumOrString {
    Num(f64),
    Str(String),
}

impl NumOrString {
    pub fn to_rational(&self) -> Result<Rational> {
        match self {
            NumOrString::Num(x) if x.is_finite() => Ok(rational_from_f64(*x)),
            NumOrString::Num(x) => Err(Error::Parse(format!("non-finite number {x}"))),
            NumOrString::Str(s) => parse_rational(s),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_examples() {
        let half = NormedLattice::rank_one(rational(1, 2)).unwrap();
        assert_eq!(half.arakelov_degree().unwrap(), Real::ln_int(2));
        assert_eq!(NormedLattice::euclidean_i64(&[vec![1, 0], vec![0, 1]]).unwrap().arakelov_degree().unwrap(), Real::zero());
        let d14 = NormedLattice::euclidean_i64(&[vec![1, 0], vec![0, 4]]).unwrap();
        assert_eq!(d14.arakelov_degree().unwrap(), -Real::ln_int(2));
        // exterior square of ℤ² with gram G has gram det G
        let g = QMat::from_i64_rows(&[vec![2, 1], vec![1, 3]]);
        let e1 = [rational(1, 1), rational(0, 1)];
        let e2 = [rational(0, 1), rational(1, 1)];
        let wedge = g.quad_form(&e1) * g.quad_form(&e2) - crate::linalg::dot(&e1, &g.mul_vec(&e2).unwrap()).pow(2);
        assert_eq!(NormedLattice::euclidean(g).unwrap().arakelov_degree().unwrap(), -Real::ln_sqrt(&wedge).unwrap());
        assert!(NormedLattice::diagonal_max(vec![Real::zero(), Real::zero()]).unwrap().arakelov_degree().is_err());
    }

    #[test]
    fn validation() {
        assert!(NormedLattice::euclidean_i64(&[vec![1, 2], vec![2, 1]]).is_err());
        assert!(NormedLattice::polyhedral_max(QMat::from_i64_rows(&[vec![1, 1], vec![2, 2]])).is_err());
        assert!(BaseField::new(1, Real::ln_int(3)).is_err());
        assert!(BaseField::new(2, Real::ln_int(3)).is_ok());
    }

    #[test]
    fn dual_examples() {
        let id = NormedLattice::euclidean_i64(&[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(id.dual().unwrap(), id);
        let d = NormedLattice::euclidean_i64(&[vec![1, 0], vec![0, 4]]).unwrap();
        let dd = d.dual().unwrap();
        assert_eq!(dd.gram().unwrap().get(1, 1), &rational(1, 4));
        assert_eq!(dd.dual().unwrap(), d);
    }

    #[test]
    fn json_roundtrip() {
        let l = NormedLattice::euclidean(QMat::from_rows(vec![
            vec![rational(2, 1), rational(1, 2)],
            vec![rational(1, 2), rational(3, 1)],
        ]).unwrap())
        .unwrap();
        let s = serde_json::to_string(&l.to_json()).unwrap();
        assert_eq!(s, r#"{"rank":2,"norm":{"type":"euclidean","gram":[["2","1/2"],["1/2","3"]]},"base":{"delta":1,"log_disc":0.0}}"#);
        let back = NormedLattice::from_json(&serde_json::from_str(&s).unwrap()).unwrap();
        assert_eq!(back, l);
        let j: LatticeJson = serde_json::from_str(r#"{"rank":2,"norm":{"type":"diagmax","c":["0","2.5"]}}"#).unwrap();
        let dm = NormedLattice::from_json(&j).unwrap();
        assert_eq!(dm.norm(), &Norm::DiagonalMax { c: vec![Real::zero(), Real::from_ratio(5, 2)] });
    }
}
