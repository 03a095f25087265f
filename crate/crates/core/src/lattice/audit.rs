//! Inequalities between minima, slopes, heights and the two filtrations, checked exactly.

use super::distortion::{distortion, Enclosure};
use super::height::height_of_map;
use super::hn::{hn_flag, slope_filtration_from};
use super::minima::{minimum_filtration_from, successive_minima};
use super::{LatticeOptions, NormedLattice};
use crate::audit::{AuditEntry, AuditReport};
use crate::error::{Error, Result};
use crate::filtration::FilteredSpace;
use crate::linalg::QMat;
use crate::real::{rational, ExtReal, Real};

/// Second input for the comparison lines.
#[derive(Clone, Debug, Default)]
pub enum Companion {
    /// Compare `L` with itself.
    #[default]
    None,
    /// Another norm on the same `ℤ^r`.
    Norm(NormedLattice),
    /// An injective map `L → target`, given as a `target.rank × r` matrix.
    Map { target: NormedLattice, map: QMat },
}

fn line(id: &str, f: impl FnOnce() -> Result<AuditEntry>) -> AuditEntry {
    match f() {
        Ok(e) => e,
        Err(Error::Unsupported(m)) => AuditEntry::hypothesis_failed(id, m),
        Err(e) => AuditEntry::from_error(id, &e),
    }
}

/// `min_k λ^{other}(V_k) - t_k + shift` over the jumps `(t_k, V_k)` of `left`;
/// non-negative iff `left_t ⊆ other_{t - shift}` for all `t`.
fn inclusion_margin(left: &FilteredSpace, other: &FilteredSpace, shift: &Real) -> Result<Real> {
    let mut worst: Option<Real> = None;
    for e in left.flag() {
        let lam = match other.lambda_of_subspace(&e.basis)? {
            ExtReal::Finite(v) => v,
            ExtReal::PosInf => continue,
            ExtReal::NegInf => return Err(Error::Degenerate("empty member in an inclusion check".into())),
        };
        let m = &(&lam - &e.level) + shift;
        worst = Some(match worst {
            None => m,
            Some(w) => w.min(m),
        });
    }
    worst.ok_or_else(|| Error::Degenerate("filtration without jumps".into()))
}

/// Seven lines: Banaszczyk's transference bound, both Bost–Künnemann bounds,
/// the slope inequality, the inclusions `F^M_t ⊆ F^S_{t-α}` and `F^S_t ⊆ F^M_{t-β}`,
/// and the lower bound on `e_min` by `μ̂_min`.
pub fn audit_inequalities(l: &NormedLattice, companion: &Companion, opts: &LatticeOptions) -> AuditReport {
    let r = l.rank();
    let base = l.base();
    let rr = rational(r as i64, 1);
    let delta = base.delta_rational();
    let half = rational(1, 2);
    let ln_delta = Real::ln(&delta).expect("δ ≥ 1");
    let ln_r = Real::ln(&rr).expect("r ≥ 1");
    let ln_three_halves = Real::ln(&rational(3, 2)).expect("positive");
    let budget = opts.budget_nodes;

    let minima = successive_minima(l, budget);
    let flag = hn_flag(l, opts);
    let mut report = AuditReport::new();

    report.push(line("banaszczyk", || {
        let m = minima.clone()?;
        let dual = successive_minima(&l.dual()?, budget)?;
        let lhs = m.e_min() + dual.e_max();
        let rhs = -Real::ln(&(rational(3, 2) * &rr))?;
        Ok(AuditEntry::ge("banaszczyk", &lhs, &rhs))
    }));

    report.push(line("bost-kunnemann-lower", || {
        let m = minima.clone()?;
        let f = flag.clone()?;
        let lhs = &(&f.slopes[0] - &Real::ln_sqrt(&(&delta * &rr))?) - &base.log_disc.scale(&(half.clone() / &delta));
        Ok(AuditEntry::le("bost-kunnemann-lower", &lhs, m.e_max()))
    }));

    report.push(line("bost-kunnemann-upper", || {
        let m = minima.clone()?;
        let f = flag.clone()?;
        let rhs = &f.slopes[0] - &ln_delta.scale(&half);
        Ok(AuditEntry::le("bost-kunnemann-upper", m.e_max(), &rhs))
    }));

    report.push(line("slope-inequality", || {
        let f = flag.clone()?;
        let (target, map) = match companion {
            Companion::Map { target, map } => (target.clone(), map.clone()),
            Companion::Norm(g) if g.is_euclidean() => (g.clone(), QMat::identity(r)),
            _ => (l.clone(), QMat::identity(r)),
        };
        if map.rank() != r {
            return Ok(AuditEntry::hypothesis_failed("slope-inequality", "map is not injective".into()));
        }
        let h = height_of_map(l, &target, &map)?;
        let tf = hn_flag(&target, opts)?;
        let rhs = &tf.slopes[0] + &h.upper();
        Ok(AuditEntry::le("slope-inequality", &f.slopes[0], &rhs))
    }));

    // the other norm g' for the inclusion lines, and D(g, g')
    let other = match companion {
        Companion::Norm(g) => g.clone(),
        _ => l.clone(),
    };
    let dist: Result<Enclosure> = if matches!(companion, Companion::Norm(_)) {
        distortion(l, &other)
    } else {
        Ok(Enclosure::exact(Real::zero()))
    };
    let fm = successive_minima(&other, budget).and_then(|m| minimum_filtration_from(r, &m));
    let fs = flag.clone().and_then(|f| slope_filtration_from(r, &f));

    report.push(line("alpha-inclusion", || {
        let alpha = &ln_r.scale(&half) + &dist.clone()?.hi;
        let m = inclusion_margin(&fm.clone()?, &fs.clone()?, &alpha)?;
        Ok(AuditEntry::ge("alpha-inclusion", &m, &Real::zero()))
    }));

    report.push(line("beta-inclusion", || {
        let beta = &(&(&(&dist.clone()?.hi + &base.log_disc) + &ln_delta.scale(&half)) + &ln_three_halves) + &ln_r;
        let m = inclusion_margin(&fs.clone()?, &fm.clone()?, &beta)?;
        Ok(AuditEntry::ge("beta-inclusion", &m, &Real::zero()))
    }));

    report.push(line("emin-lemma", || {
        let m = minima.clone()?;
        let f = flag.clone()?;
        let mu_min = f.slopes.last().expect("non-empty");
        let rhs = &(&(&(mu_min - &base.log_disc) - &ln_delta.scale(&half)) - &ln_three_halves) - &ln_r;
        Ok(AuditEntry::ge("emin-lemma", m.e_min(), &rhs))
    }));

    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audit::Verdict;

    fn ids(rep: &AuditReport) -> Vec<&str> {
        rep.iter().map(|e| e.id.as_str()).collect()
    }

    #[test]
    fn identity_lattice() {
        let l = NormedLattice::euclidean_i64(&[vec![1, 0], vec![0, 1]]).unwrap();
        let rep = audit_inequalities(&l, &Companion::None, &LatticeOptions::default());
        assert_eq!(
            ids(&rep),
            vec![
                "banaszczyk",
                "bost-kunnemann-lower",
                "bost-kunnemann-upper",
                "slope-inequality",
                "alpha-inclusion",
                "beta-inclusion",
                "emin-lemma"
            ]
        );
        assert!(rep.all_pass(), "{rep:?}");
        let b = &rep.entries[0];
        assert!(b.margin.starts_with("1.0986"), "{}", b.margin);
    }

    #[test]
    fn diagonal_lattice() {
        let l = NormedLattice::euclidean_i64(&[vec![1, 0], vec![0, 4]]).unwrap();
        let rep = audit_inequalities(&l, &Companion::None, &LatticeOptions::default());
        assert!(rep.all_pass(), "{rep:?}");
        // e_max = μ_max = 0: the upper bound is tight
        assert_eq!(rep.entries[2].margin, "0");
    }

    #[test]
    fn companion_norm_and_map() {
        let l = NormedLattice::euclidean_i64(&[vec![2, 1], vec![1, 3]]).unwrap();
        let g = NormedLattice::diagonal_max(vec![Real::zero(), Real::from_ratio(-1, 2)]).unwrap();
        let rep = audit_inequalities(&l, &Companion::Norm(g), &LatticeOptions::default());
        assert_eq!(rep.count(Verdict::Fail), 0, "{rep:?}");
        let t = NormedLattice::euclidean_i64(&[vec![1, 0], vec![0, 1]]).unwrap();
        let rep = audit_inequalities(
            &l,
            &Companion::Map {
                target: t.clone(),
                map: QMat::from_i64_rows(&[vec![1, 1], vec![0, 2]]),
            },
            &LatticeOptions::default(),
        );
        assert!(rep.all_pass(), "{rep:?}");
        let rep = audit_inequalities(
            &l,
            &Companion::Map {
                target: t,
                map: QMat::from_i64_rows(&[vec![1, 1], vec![1, 1]]),
            },
            &LatticeOptions::default(),
        );
        assert_eq!(rep.entries[3].verdict, Verdict::HypothesisFailed);
    }
}
