//! Built-in instances: weighted monomial models on `ℙ^N` with closed-form limits, and seeded random
//! lattices and filtrations.

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filtration::FilteredSpace;
use crate::graded::{GradedSeries, Selection, Weight};
use crate::lattice::NormedLattice;
use crate::linalg::QMat;
use crate::real::{format_rational, rational, Rational, Real};

/// Rationals as `"p/q"` strings; numbers are accepted on input.
mod qstr {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::lattice::NumOrString;
    use crate::real::{format_rational, Rational};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        NumOrString::deserialize(d)?.to_rational().map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use serde::ser::SerializeSeq;
        use serde::{Deserialize, Deserializer, Serializer};

        use crate::lattice::NumOrString;
        use crate::real::{format_rational, Rational};

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for q in v {
                seq.serialize_element(&format_rational(q))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            Vec::<NumOrString>::deserialize(d)?
                .iter()
                .map(|x| x.to_rational().map_err(serde::de::Error::custom))
                .collect()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    /// `ℙ¹`, `w(a, n) = λ a₁`.
    WeightedP1 {
        #[serde(with = "qstr")]
        lambda: Rational,
    },
    /// `ℙ^N`, `w(a, n) = Σ w_i a_i`.
    WeightedPn {
        n: usize,
        #[serde(with = "qstr::vec")]
        weights: Vec<Rational>,
    },
    /// `ℙ¹`, `w(a, n) = λ n`.
    ConstantTwist {
        #[serde(with = "qstr")]
        lambda: Rational,
    },
    /// `ℙ¹`, `w(a, n) = a a₁ + b a₀`.
    TwoSided {
        #[serde(with = "qstr")]
        a: Rational,
        #[serde(with = "qstr")]
        b: Rational,
    },
    /// Gram matrix `MᵀM + I`, `M` a random integer matrix, all entries at most `bound` in absolute value.
    RandomLattice { rank: usize, bound: i64, seed: u64 },
    /// Random nested flag in `ℚ^dim` with levels in `¼ℤ ∩ [-3, 3]`.
    RandomFlag { dim: usize, seed: u64 },
}

#[derive(Clone, Debug)]
pub enum Built {
    Series(GradedSeries),
    Lattice(NormedLattice),
    Flag(FilteredSpace),
}

impl Built {
    pub fn series(self) -> Result<GradedSeries> {
        match self {
            Built::Series(s) => Ok(s),
            _ => Err(Error::InvalidParameter("model is not a graded series".into())),
        }
    }

    pub fn lattice(self) -> Result<NormedLattice> {
        match self {
            Built::Lattice(l) => Ok(l),
            _ => Err(Error::InvalidParameter("model is not a lattice".into())),
        }
    }

    pub fn flag(self) -> Result<FilteredSpace> {
        match self {
            Built::Flag(f) => Ok(f),
            _ => Err(Error::InvalidParameter("model is not a filtered space".into())),
        }
    }
}

fn monomial(w_lin: Vec<Rational>, w0: Rational) -> Result<GradedSeries> {
    GradedSeries::monomial(Weight { w_lin, w0 }, Selection::All)
}

pub fn build(spec: &ModelSpec) -> Result<Built> {
    Ok(match spec {
        ModelSpec::WeightedP1 { lambda } => Built::Series(monomial(vec![Rational::zero(), lambda.clone()], Rational::zero())?),
        ModelSpec::WeightedPn { n, weights } => {
            if *n == 0 || weights.len() != n + 1 {
                return Err(Error::InvalidParameter(format!(
                    "weighted_pn needs N ≥ 1 and N + 1 weights, got N = {n} and {} weights",
                    weights.len()
                )));
            }
            Built::Series(monomial(weights.clone(), Rational::zero())?)
        }
        ModelSpec::ConstantTwist { lambda } => Built::Series(monomial(vec![Rational::zero(); 2], lambda.clone())?),
        ModelSpec::TwoSided { a, b } => Built::Series(monomial(vec![b.clone(), a.clone()], Rational::zero())?),
        ModelSpec::RandomLattice { rank, bound, seed } => Built::Lattice(random_lattice(*rank, *bound, *seed)?),
        ModelSpec::RandomFlag { dim, seed } => Built::Flag(random_flag(*dim, *seed)?),
    })
}

/// `G = MᵀM + I` with `M ∈ {-2..2}^{r×r}` (then `{-1..1}`) redrawn until `|G_ij| ≤ bound`; `G = I` as a last resort.
pub fn random_lattice(rank: usize, bound: i64, seed: u64) -> Result<NormedLattice> {
    if rank == 0 || rank > 16 {
        return Err(Error::InvalidParameter(format!("rank {rank} outside 1..=16")));
    }
    if bound < 1 {
        return Err(Error::InvalidParameter("gram entry bound must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (spread, tries) in [(2i64, 200), (1, 200)] {
        for _ in 0..tries {
            let m: Vec<Vec<i64>> = (0..rank)
                .map(|_| (0..rank).map(|_| rng.gen_range(-spread..=spread)).collect())
                .collect();
            let g: Vec<Vec<i64>> = (0..rank)
                .map(|i| {
                    (0..rank)
                        .map(|j| (0..rank).map(|k| m[k][i] * m[k][j]).sum::<i64>() + i64::from(i == j))
                        .collect()
                })
                .collect();
            if g.iter().flatten().all(|x| x.abs() <= bound) {
                return NormedLattice::euclidean_i64(&g);
            }
        }
    }
    NormedLattice::euclidean(QMat::identity(rank))
}

/// Random basis with entries in `{-3..3}`, `F_{t_i}` spanned by its first `d_i` vectors
/// for strictly increasing levels `t_i` and strictly decreasing `d_1 = dim > d_2 > …`.
pub fn random_flag(dim: usize, seed: u64) -> Result<FilteredSpace> {
    if dim == 0 || dim > 16 {
        return Err(Error::InvalidParameter(format!("dimension {dim} outside 1..=16")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis = loop {
        let cols: Vec<Vec<Rational>> = (0..dim)
            .map(|_| (0..dim).map(|_| rational(rng.gen_range(-3..=3), 1)).collect())
            .collect();
        let m = QMat::from_cols(dim, &cols)?;
        if m.rank() == dim {
            break cols;
        }
    };
    let jumps = rng.gen_range(1..=dim);
    // distinct dims: dim, then jumps-1 values from 1..dim, decreasing
    let mut dims: Vec<usize> = (1..dim).collect();
    for i in (1..dims.len()).rev() {
        dims.swap(i, rng.gen_range(0..=i));
    }
    dims.truncate(jumps - 1);
    dims.push(dim);
    dims.sort_unstable_by(|a, b| b.cmp(a));
    let mut levels: Vec<i64> = (-12..=12).collect();
    for i in (1..levels.len()).rev() {
        levels.swap(i, rng.gen_range(0..=i));
    }
    levels.truncate(jumps);
    levels.sort_unstable();
    let entries = levels
        .iter()
        .zip(&dims)
        .map(|(&t, &d)| Ok((Real::from_ratio(t, 4), QMat::from_cols(dim, &basis[..d])?)))
        .collect::<Result<Vec<_>>>()?;
    FilteredSpace::new(dim, entries)
}

/// Limit of `T_{1/n} ν_{(B_n, F^M)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LimitMeasure {
    Dirac(Rational),
    Uniform { lo: Rational, hi: Rational },
}

impl LimitMeasure {
    pub fn to_reference(&self) -> crate::measure::Reference {
        let f = |q: &Rational| num_traits::ToPrimitive::to_f64(q).unwrap_or(f64::NAN);
        match self {
            LimitMeasure::Dirac(x) => crate::measure::Reference::dirac(f(x)),
            LimitMeasure::Uniform { lo, hi } => crate::measure::Reference::Uniform { lo: f(lo), hi: f(hi) },
        }
    }
}

/// Exact closed forms; `None` where the model has none.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleRecord {
    pub vol: Rational,
    pub vol_hat: Rational,
    pub limit: Option<LimitMeasure>,
    /// `lim λ_max(B_n)/n`.
    pub mu_pi_max: Rational,
    /// `ν([0, +∞[)` for the limit measure.
    pub effective_tail: Option<Rational>,
}

impl OracleRecord {
    pub fn to_json(&self) -> serde_json::Value {
        let limit = self.limit.as_ref().map(|l| match l {
            LimitMeasure::Dirac(x) => serde_json::json!({"type": "dirac", "at": format_rational(x)}),
            LimitMeasure::Uniform { lo, hi } => {
                serde_json::json!({"type": "uniform", "lo": format_rational(lo), "hi": format_rational(hi)})
            }
        });
        serde_json::json!({
            "vol": format_rational(&self.vol),
            "vol_hat": format_rational(&self.vol_hat),
            "limit": limit,
            "mu_pi_max": format_rational(&self.mu_pi_max),
            "effective_tail": self.effective_tail.as_ref().map(format_rational),
        })
    }
}

/// `ℙ¹` with `w = a a₁ + b a₀`: the limit is the law of `b + (a - b) s`, `s` uniform on `[0, 1]`;
/// `vol̂ = 2 ∫ max{x, 0}`.
fn p1_oracle(a: &Rational, b: &Rational) -> OracleRecord {
    let (lo, hi) = if a <= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
    let zero = Rational::zero();
    let (vol_hat, tail) = if lo >= zero {
        (&lo + &hi, Rational::from_integer(1.into()))
    } else if hi <= zero {
        (zero.clone(), zero.clone())
    } else {
        (&hi * &hi / (&hi - &lo), &hi / (&hi - &lo))
    };
    let limit = if lo == hi {
        LimitMeasure::Dirac(lo)
    } else {
        LimitMeasure::Uniform { lo, hi: hi.clone() }
    };
    OracleRecord {
        vol: Rational::from_integer(1.into()),
        vol_hat,
        limit: Some(limit),
        mu_pi_max: hi,
        effective_tail: Some(tail),
    }
}

pub fn oracle(spec: &ModelSpec) -> Result<OracleRecord> {
    match spec {
        ModelSpec::WeightedP1 { lambda } => Ok(p1_oracle(lambda, &Rational::zero())),
        ModelSpec::ConstantTwist { lambda } => Ok(p1_oracle(lambda, lambda)),
        ModelSpec::TwoSided { a, b } => Ok(p1_oracle(a, b)),
        ModelSpec::WeightedPn { n, weights } => {
            build(spec)?;
            let mu = weights.iter().max().expect("N + 1 weights").clone();
            if weights.iter().any(Signed::is_negative) {
                if *n == 1 {
                    return Ok(p1_oracle(&weights[1], &weights[0]));
                }
                return Err(Error::Unsupported("no closed form for mixed-sign weights on ℙ^N, N ≥ 2".into()));
            }
            // the uniform law on the simplex has E[t_i] = 1/(N+1), so vol̂ = (N+1)·E⟨w,t⟩ = Σ w_i
            let limit = if weights.iter().all(|w| *w == weights[0]) {
                Some(LimitMeasure::Dirac(weights[0].clone()))
            } else if *n == 1 {
                p1_oracle(&weights[1], &weights[0]).limit
            } else {
                None
            };
            Ok(OracleRecord {
                vol: Rational::from_integer(1.into()),
                vol_hat: weights.iter().sum(),
                limit,
                mu_pi_max: mu,
                effective_tail: Some(Rational::from_integer(1.into())),
            })
        }
        ModelSpec::RandomLattice { .. } | ModelSpec::RandomFlag { .. } => {
            Err(Error::Unsupported("random models have no closed-form oracle".into()))
        }
    }
}

/// `(a, b)` ordered so that the degree-`p` generators of `B^[0]` are `a₁ ∈ [k, p]`, and `k`.
fn generator_threshold(a: &Rational, b: &Rational, p: usize) -> Result<(Rational, Rational, i64)> {
    let (a, b) = if a >= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
    if a.is_negative() {
        return Err(Error::Degenerate(format!("B^[0]_{p} = 0")));
    }
    let pp = rational(p as i64, 1);
    let k = if a == b {
        0
    } else {
        let t = -(&b * &pp) / (&a - &b);
        let c = t.ceil().to_integer();
        num_traits::ToPrimitive::to_i64(&c).unwrap_or(0).max(0)
    };
    Ok((a, b, k))
}

/// `vol̂(B^(p))` for `two_sided(a, b)`: `2[b(1 - k/p) + (a - b)(1 - k²/p²)/2]`, `k = ⌈-bp/(a - b)⌉₊`.
pub fn fujita_oracle(a: &Rational, b: &Rational, p: usize) -> Result<Rational> {
    if p == 0 {
        return Err(Error::InvalidParameter("p must be positive".into()));
    }
    let (a, b, k) = generator_threshold(a, b, p)?;
    let s = rational(k, p as i64);
    let one = Rational::from_integer(1.into());
    Ok(rational(2, 1) * (&b * (&one - &s) + (&a - &b) * (&one - &s * &s) / rational(2, 1)))
}

/// `rank B^(p)_{np} / rank B_{np} = (np - nk + 1)/(np + 1)` for `two_sided(a, b)`.
pub fn generated_rank_ratio_oracle(a: &Rational, b: &Rational, p: usize, n: usize) -> Result<Rational> {
    let (_, _, k) = generator_threshold(a, b, p)?;
    let np = (n * p) as i64;
    Ok(rational(np - n as i64 * k + 1, np + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::{generated_rank_ratio, volume_estimate};
    use crate::lattice::Norm;

    #[test]
    fn spec_json_roundtrip() {
        let s: ModelSpec = serde_json::from_str(r#"{"kind":"two_sided","a":"1","b":-1}"#).unwrap();
        assert_eq!(
            s,
            ModelSpec::TwoSided {
                a: rational(1, 1),
                b: rational(-1, 1)
            }
        );
        let j = serde_json::to_string(&ModelSpec::WeightedP1 { lambda: rational(1, 2) }).unwrap();
        assert_eq!(j, r#"{"kind":"weighted_p1","lambda":"1/2"}"#);
        assert!(serde_json::from_str::<ModelSpec>(r#"{"kind":"random_lattice","rank":3,"bound":5}"#).is_err());
    }

    #[test]
    fn build_examples() {
        let b = build(&ModelSpec::WeightedP1 { lambda: rational(1, 1) }).unwrap().series().unwrap();
        assert_eq!(b.weights(3).unwrap(), (0..4).map(|j| rational(j, 1)).collect::<Vec<_>>());
        let t = build(&ModelSpec::TwoSided {
            a: rational(1, 1),
            b: rational(-1, 1),
        })
        .unwrap()
        .series()
        .unwrap();
        assert_eq!(t.weights(2).unwrap(), vec![rational(-2, 1), rational(0, 1), rational(2, 1)]);
        let c = build(&ModelSpec::ConstantTwist { lambda: rational(1, 2) }).unwrap().series().unwrap();
        assert_eq!(c.weights(4).unwrap(), vec![rational(2, 1); 5]);
        assert!(build(&ModelSpec::WeightedPn {
            n: 2,
            weights: vec![rational(1, 1)]
        })
        .is_err());
    }

    #[test]
    fn random_lattices_are_reproducible() {
        let spec = ModelSpec::RandomLattice {
            rank: 3,
            bound: 5,
            seed: 7,
        };
        let l = build(&spec).unwrap().lattice().unwrap();
        assert_eq!(l.norm(), build(&spec).unwrap().lattice().unwrap().norm());
        let Norm::Euclidean { gram } = l.norm() else { panic!() };
        assert!(gram.is_positive_definite());
        assert!(gram.entries().iter().all(|x| x.abs() <= rational(5, 1)));
        assert!(random_lattice(2, 0, 1).is_err());
    }

    #[test]
    fn random_flags_are_nested() {
        for seed in 0..20 {
            let f = random_flag(4, seed).unwrap();
            assert_eq!(f.dim(), 4);
            assert_eq!(f.flag()[0].rank(), 4);
            assert_eq!(f.measure_of().total_weight(), rational(1, 1));
        }
    }

    #[test]
    fn oracle_examples() {
        let o = oracle(&ModelSpec::WeightedP1 { lambda: rational(1, 1) }).unwrap();
        assert_eq!(o.vol_hat, rational(1, 1));
        assert_eq!(
            o.limit,
            Some(LimitMeasure::Uniform {
                lo: rational(0, 1),
                hi: rational(1, 1)
            })
        );
        assert_eq!(o.mu_pi_max, rational(1, 1));
        let o = oracle(&ModelSpec::TwoSided {
            a: rational(1, 1),
            b: rational(-1, 1),
        })
        .unwrap();
        assert_eq!((o.vol.clone(), o.vol_hat.clone()), (rational(1, 1), rational(1, 2)));
        assert_eq!(o.effective_tail, Some(rational(1, 2)));
        let o = oracle(&ModelSpec::ConstantTwist { lambda: rational(3, 2) }).unwrap();
        assert_eq!(o.vol_hat, rational(3, 1));
        assert_eq!(o.limit, Some(LimitMeasure::Dirac(rational(3, 2))));
        let o = oracle(&ModelSpec::WeightedPn {
            n: 2,
            weights: vec![rational(0, 1), rational(1, 1), rational(2, 1)],
        })
        .unwrap();
        assert_eq!(o.vol_hat, rational(3, 1));
        assert!(oracle(&ModelSpec::RandomFlag { dim: 2, seed: 0 }).is_err());
    }

    #[test]
    fn fujita_oracle_values() {
        let (a, b) = (rational(1, 1), rational(-1, 1));
        for p in [2, 4, 8] {
            assert_eq!(fujita_oracle(&a, &b, p).unwrap(), rational(1, 2));
        }
        assert_eq!(fujita_oracle(&a, &b, 3).unwrap(), rational(4, 9));
        assert_eq!(fujita_oracle(&a, &b, 5).unwrap(), rational(12, 25));
        assert_eq!(fujita_oracle(&a, &b, 7).unwrap(), rational(24, 49));
        // all-effective model: B^(p) = B
        assert_eq!(fujita_oracle(&rational(1, 1), &rational(0, 1), 3).unwrap(), rational(1, 1));
        assert!(fujita_oracle(&rational(-1, 1), &rational(-2, 1), 2).is_err());
    }

    #[test]
    fn rank_ratio_oracle_matches_sumsets() {
        let (a, b) = (rational(1, 1), rational(-1, 1));
        let t = build(&ModelSpec::TwoSided { a: a.clone(), b: b.clone() }).unwrap().series().unwrap();
        for p in 1..=5 {
            for n in 1..=6 {
                assert_eq!(
                    generated_rank_ratio(&t, p, n).unwrap(),
                    generated_rank_ratio_oracle(&a, &b, p, n).unwrap(),
                    "p = {p}, n = {n}"
                );
            }
        }
        assert_eq!(generated_rank_ratio_oracle(&a, &b, 2, 3).unwrap(), rational(4, 7));
        let v = volume_estimate(&t, &[100, 200, 400]).unwrap();
        assert_eq!(v.dim, 1);
    }
}
