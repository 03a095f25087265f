//! Monomial selections: which exponent vectors `a ∈ ℕ^{N+1}, |a| = n` span `B_n`.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::real::Rational;

pub type Exponent = Vec<u32>;

/// Affine weight `w(a, n) = ⟨w_lin, a⟩ + w0 n` on `ℙ^N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Weight {
    pub w_lin: Vec<Rational>,
    pub w0: Rational,
}

impl Weight {
    pub fn proj_dim(&self) -> usize {
        self.w_lin.len() - 1
    }

    pub fn eval(&self, a: &[u32], n: usize) -> Rational {
        let mut acc = &self.w0 * Rational::from_integer(n.into());
        for (w, &ai) in self.w_lin.iter().zip(a) {
            if ai != 0 {
                acc += w * Rational::from_integer(ai.into());
            }
        }
        acc
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Selection {
    All,
    /// Monomials of `inner` with `w(a, n) ≥ λ n`; degree 0 keeps the constant.
    AtLeast { lambda: Rational, inner: Box<Selection> },
    /// Degree `kp`: `k`-fold sums of the degree-`p` monomials of `inner`; other degrees empty.
    Generated { p: usize, inner: Box<Selection> },
}

/// All exponents of total degree `n` in `N + 1` variables, ordered by the reversed
/// vector (so on `ℙ¹` by increasing `a_1`).
pub fn all_exponents(proj_dim: usize, n: usize) -> Vec<Exponent> {
    let vars = proj_dim + 1;
    let mut out = Vec::new();
    let mut cur = vec![0u32; vars];
    fill(&mut out, &mut cur, vars - 1, n as u32);
    out
}

// assigns the variables from the last down, so the output is sorted by the reversed vector
fn fill(out: &mut Vec<Exponent>, cur: &mut Exponent, i: usize, left: u32) {
    if i == 0 {
        cur[0] = left;
        out.push(cur.clone());
        return;
    }
    for v in 0..=left {
        cur[i] = v;
        fill(out, cur, i - 1, left - v);
    }
    cur[i] = 0;
}

fn reversed_key(a: &Exponent) -> Vec<u32> {
    a.iter().rev().copied().collect()
}

/// `k`-fold sumset of `gen`, by repeated addition.
pub fn sumset(gen: &[Exponent], k: usize, vars: usize) -> Vec<Exponent> {
    let mut cur: BTreeSet<Vec<u32>> = BTreeSet::new();
    cur.insert(vec![0; vars]);
    for _ in 0..k {
        let mut next = BTreeSet::new();
        for s in &cur {
            for g in gen {
                next.insert(s.iter().zip(g).map(|(x, y)| x + y).collect::<Vec<u32>>());
            }
        }
        cur = next;
    }
    let mut v: Vec<Exponent> = cur.into_iter().collect();
    v.sort_by_key(reversed_key);
    v
}

impl Selection {
    pub fn at_least(lambda: Rational, inner: Selection) -> Selection {
        Selection::AtLeast {
            lambda,
            inner: Box::new(inner),
        }
    }

    pub fn generated(p: usize, inner: Selection) -> Selection {
        Selection::Generated { p, inner: Box::new(inner) }
    }

    /// Selected exponents in degree `n`, in the canonical order.
    pub fn exponents(&self, weight: &Weight, n: usize) -> Result<Vec<Exponent>> {
        let vars = weight.w_lin.len();
        match self {
            Selection::All => Ok(all_exponents(vars - 1, n)),
            Selection::AtLeast { lambda, inner } => {
                let base = inner.exponents(weight, n)?;
                if n == 0 {
                    return Ok(base);
                }
                let bound = lambda * Rational::from_integer(n.into());
                Ok(base.into_iter().filter(|a| weight.eval(a, n) >= bound).collect())
            }
            Selection::Generated { p, inner } => {
                if *p == 0 {
                    return Err(Error::InvalidParameter("generating degree must be positive".into()));
                }
                if !n.is_multiple_of(*p) {
                    return Ok(Vec::new());
                }
                let gen = inner.exponents(weight, *p)?;
                if gen.is_empty() {
                    return Err(Error::Degenerate(format!("no generators in degree {p}")));
                }
                Ok(sumset(&gen, n / p, vars))
            }
        }
    }

    /// Whether every selected monomial satisfies `w(a, n) ≥ 0` for `n ≥ 1` by construction.
    pub fn is_effective(&self) -> bool {
        match self {
            Selection::All => false,
            Selection::AtLeast { lambda, inner } => *lambda >= Rational::from_integer(0.into()) || inner.is_effective(),
            Selection::Generated { inner, .. } => inner.is_effective(),
        }
    }
}
