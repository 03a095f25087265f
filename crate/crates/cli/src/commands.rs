//! The six commands. Each writes its artifacts to the output directory and returns a status.

use std::path::Path;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use slopekit::audit::{AuditReport, Verdict};
use slopekit::error::Error;
use slopekit::filtration::FilteredSpace;
use slopekit::graded::{
    arithmetic_volume_estimate, asymptotic_trace, effective_subseries, fujita_experiment, generated_subalgebra,
    metric_comparison_experiment, truncation_comparison, volume_estimate, volume_identity_check, GradedSeries,
    WeightPerturbation,
};
use slopekit::lattice::{audit_inequalities, Companion, LatticeOptions, NormedLattice};
use slopekit::measure::PiecewiseLinear;
use slopekit::models::{build, fujita_oracle, oracle, ModelSpec};
use slopekit::real::{format_rational, rational, Rational};

use crate::config::{Command, ExperimentConfig};

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub kind: &'static str,
    pub reasons: Vec<String>,
}

impl Failure {
    fn new(code: u8, kind: &'static str, reasons: Vec<String>) -> Self {
        Failure { code, kind, reasons }
    }

    pub fn config(msg: String) -> Self {
        Failure::new(4, "config", vec![msg])
    }

    pub fn to_json(&self) -> Value {
        json!({"exit_code": self.code, "kind": self.kind, "reasons": self.reasons})
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_budget() {
            Failure::new(3, "budget", vec![e.to_string()])
        } else {
            Failure::config(e.to_string())
        }
    }
}

pub enum Status {
    Pass,
    Failed(Failure),
}

type Outcome = Result<Status, Failure>;

pub fn run(cfg: &ExperimentConfig) -> Outcome {
    std::fs::create_dir_all(&cfg.out).map_err(|e| Failure::config(format!("cannot create {}: {e}", cfg.out.display())))?;
    match cfg.command {
        Command::Measure => measure(cfg),
        Command::LatticeAudit => lattice_audit(cfg),
        Command::Trace => trace(cfg),
        Command::Fujita => fujita(cfg),
        Command::Truncation => truncation(cfg),
        Command::MetricCompare => metric_compare(cfg),
    }
}

fn meta(cfg: &ExperimentConfig) -> Map<String, Value> {
    let mut m = Map::new();
    if cfg.timestamp {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        m.insert("generated_at".into(), json!(secs));
    }
    m.insert(
        "command".into(),
        serde_json::to_value(cfg.command).expect("serializable"),
    );
    m.insert("seed".into(), json!(cfg.seed));
    m
}

fn write(path: &Path, body: &str) -> Result<(), Failure> {
    std::fs::write(path, body).map_err(|e| Failure::config(format!("cannot write {}: {e}", path.display())))
}

fn write_json(cfg: &ExperimentConfig, name: &str, mut body: Map<String, Value>) -> Result<(), Failure> {
    let mut out = meta(cfg);
    out.append(&mut body);
    let text = serde_json::to_string_pretty(&Value::Object(out)).expect("serializable");
    write(&cfg.out.join(name), &format!("{text}\n"))
}

fn write_csv(cfg: &ExperimentConfig, name: &str, body: &str) -> Result<(), Failure> {
    let meta = meta(cfg);
    let header = match meta.get("generated_at") {
        Some(t) => format!("# generated_at={t}\n"),
        None => String::new(),
    };
    write(&cfg.out.join(name), &format!("{header}{body}"))
}

fn series(cfg: &ExperimentConfig) -> Result<(ModelSpec, GradedSeries), Failure> {
    let spec = cfg
        .model
        .clone()
        .ok_or_else(|| Failure::config("this command needs a `model` in the config".into()))?;
    let b = build(&spec)?.series()?;
    Ok((spec, b))
}

/// Fail on any failed line, then on any undecided one.
fn verdict_of(reports: &[&AuditReport]) -> Status {
    let lines = || reports.iter().flat_map(|r| r.iter());
    let failed: Vec<String> = lines()
        .filter(|e| e.verdict == Verdict::Fail)
        .map(|e| format!("{} (margin {})", e.id, e.margin))
        .collect();
    if !failed.is_empty() {
        return Status::Failed(Failure::new(1, "audit", failed));
    }
    let unverified: Vec<String> = lines()
        .filter(|e| e.verdict == Verdict::Unverified)
        .map(|e| format!("{}: {}", e.id, e.margin))
        .collect();
    if !unverified.is_empty() {
        return Status::Failed(Failure::new(3, "budget", unverified));
    }
    Status::Pass
}

fn measure(cfg: &ExperimentConfig) -> Outcome {
    let fs = match (&cfg.filtration, &cfg.model) {
        (Some(j), _) => FilteredSpace::from_json(j)?,
        (None, Some(spec)) => build(spec)?.flag()?,
        (None, None) => build(&ModelSpec::RandomFlag { dim: 4, seed: cfg.seed })?.flag()?,
    };
    let m = fs.measure_of();
    let mut body = Map::new();
    body.insert("dim".into(), json!(fs.dim()));
    body.insert("filtration".into(), serde_json::to_value(fs.to_json()).expect("serializable"));
    body.insert("measure".into(), serde_json::to_value(m.to_json()).expect("serializable"));
    write_json(cfg, "measure.json", body)?;
    write_csv(cfg, "measure.csv", &m.to_csv())?;
    Ok(Status::Pass)
}

fn lattice_audit(cfg: &ExperimentConfig) -> Outcome {
    let opts = LatticeOptions {
        budget_nodes: cfg.budget_nodes,
        kappa: None,
    };
    let instances: Vec<(Option<u64>, NormedLattice)> = match &cfg.lattice {
        Some(j) => vec![(None, NormedLattice::from_json(j)?)],
        None => {
            let spec = cfg.model.clone().unwrap_or(ModelSpec::RandomLattice {
                rank: 3,
                bound: 5,
                seed: cfg.seed,
            });
            let ModelSpec::RandomLattice { rank, bound, seed } = spec else {
                return Err(Failure::config("lattice-audit needs a `lattice` or a random_lattice model".into()));
            };
            (0..cfg.count.unwrap_or(1) as u64)
                .map(|i| {
                    let s = seed.wrapping_add(i);
                    let l = build(&ModelSpec::RandomLattice { rank, bound, seed: s })?.lattice()?;
                    Ok((Some(s), l))
                })
                .collect::<Result<_, Error>>()?
        }
    };
    let companion = match &cfg.companion {
        Some(j) => Companion::Norm(NormedLattice::from_json(j)?),
        None => Companion::None,
    };
    let reports: Vec<AuditReport> = instances
        .par_iter()
        .map(|(_, l)| audit_inequalities(l, &companion, &opts))
        .collect();
    let rows: Vec<Value> = instances
        .iter()
        .zip(&reports)
        .map(|((seed, l), rep)| json!({"seed": seed, "lattice": l.to_json(), "entries": rep}))
        .collect();
    let all: Vec<&AuditReport> = reports.iter().collect();
    let count = |v: Verdict| all.iter().map(|r| r.count(v)).sum::<usize>();
    let mut body = Map::new();
    body.insert(
        "summary".into(),
        json!({
            "instances": rows.len(),
            "pass": count(Verdict::Pass),
            "fail": count(Verdict::Fail),
            "unverified": count(Verdict::Unverified),
            "hypothesis_failed": count(Verdict::HypothesisFailed),
        }),
    );
    body.insert("instances".into(), Value::Array(rows));
    write_json(cfg, "audit.json", body)?;
    Ok(verdict_of(&all))
}

fn close(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol * target.abs().max(1e-12)
}

struct Checks(Vec<Value>, Vec<String>);

impl Checks {
    fn new() -> Self {
        Checks(Vec::new(), Vec::new())
    }

    fn add(&mut self, name: &str, value: f64, target: f64, tol: f64, pass: bool) {
        self.0
            .push(json!({"name": name, "value": value, "target": target, "tolerance": tol, "pass": pass}));
        if !pass {
            self.1.push(format!("{name}: {value} vs {target} (tolerance {tol})"));
        }
    }

    fn status(self, budget: Vec<String>) -> (Value, Status) {
        let status = if !self.1.is_empty() {
            Status::Failed(Failure::new(2, "tolerance", self.1))
        } else if !budget.is_empty() {
            Status::Failed(Failure::new(3, "budget", budget))
        } else {
            Status::Pass
        };
        (Value::Array(self.0), status)
    }
}

fn q(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn trace(cfg: &ExperimentConfig) -> Outcome {
    let (spec, b) = series(cfg)?;
    let tol = &cfg.tolerances;
    let o = oracle(&spec).ok();
    let reference = o.as_ref().and_then(|o| o.limit.as_ref()).map(|l| l.to_reference());
    let tr = asymptotic_trace(&b, &cfg.degrees, reference.as_ref())?;
    write_csv(cfg, "trace.csv", &tr.to_csv())?;

    let mut checks = Checks::new();
    let budget: Vec<String> = tr
        .records
        .iter()
        .filter_map(|r| r.error.as_ref().map(|e| format!("degree {}: {e}", r.n)))
        .collect();
    let mut body = Map::new();
    body.insert("model".into(), serde_json::to_value(&spec).expect("serializable"));
    body.insert("degrees".into(), json!(cfg.degrees));
    match volume_estimate(&b, &cfg.degrees) {
        Ok(v) => {
            if let Some(o) = &o {
                checks.add("vol", v.estimate, q(&o.vol), tol.vol, close(v.estimate, q(&o.vol), tol.vol));
            }
            body.insert(
                "volume".into(),
                json!({"dim": v.dim, "fitted_slope": v.fitted_slope, "flagged": v.flagged,
                       "sequence": v.sequence, "estimate": v.estimate}),
            );
        }
        Err(e) => {
            body.insert("volume".into(), json!({"error": e.to_string()}));
        }
    }
    if budget.is_empty() {
        let a = arithmetic_volume_estimate(&b, &cfg.degrees)?;
        if let Some(o) = &o {
            let t = q(&o.vol_hat);
            checks.add("vol_hat", a.estimate, t, tol.vol, close(a.estimate, t, tol.vol));
        }
        body.insert("arithmetic_volume".into(), json!({"sequence": a.sequence, "estimate": a.estimate}));
        match volume_identity_check(&b, &cfg.degrees, tol.identity) {
            Ok(e) => {
                checks.add(
                    "volume_identity_ratio",
                    e.lhs.parse().unwrap_or(f64::NAN),
                    1.0,
                    tol.identity,
                    e.passed(),
                );
                body.insert("volume_identity".into(), serde_json::to_value(&e).expect("serializable"));
            }
            Err(e) => {
                body.insert("volume_identity".into(), json!({"error": e.to_string()}));
            }
        }
    }
    if let Some(last) = tr.last() {
        if let Some(d) = last.cdf_distance {
            checks.add("cdf_distance", d, 0.0, tol.cdf, d <= tol.cdf);
        }
    }
    if let Some(o) = &o {
        body.insert("oracle".into(), o.to_json());
    }
    let (checks, status) = checks.status(budget);
    body.insert("checks".into(), checks);
    write_json(cfg, "trace.json", body)?;
    Ok(status)
}

/// `(a, b)` with `w = a a₁ + b a₀` for the `ℙ¹` models.
fn p1_weights(spec: &ModelSpec) -> Option<(Rational, Rational)> {
    match spec {
        ModelSpec::WeightedP1 { lambda } => Some((lambda.clone(), Rational::from_integer(0.into()))),
        ModelSpec::ConstantTwist { lambda } => Some((lambda.clone(), lambda.clone())),
        ModelSpec::TwoSided { a, b } => Some((a.clone(), b.clone())),
        ModelSpec::WeightedPn { n: 1, weights } => Some((weights[1].clone(), weights[0].clone())),
        _ => None,
    }
}

fn fujita(cfg: &ExperimentConfig) -> Outcome {
    let (spec, b) = series(cfg)?;
    let p_list = if cfg.p_list.is_empty() { vec![2, 4, 8] } else { cfg.p_list.clone() };
    let rep = fujita_experiment(&b, &p_list, &cfg.degrees)?;
    let mut csv = String::from("p,degree,vol_hat,envelope,reference\n");
    let mut checks = Checks::new();
    let mut rows = Vec::new();
    for r in &rep.rows {
        csv.push_str(&format!("{},{},{},{},{}\n", r.p, r.degree, r.vol_hat, r.envelope, rep.reference));
        let exact = p1_weights(&spec).and_then(|(a, bb)| fujita_oracle(&a, &bb, r.p).ok());
        if let Some(x) = &exact {
            let t = q(x);
            checks.add(&format!("vol_hat[p={}]", r.p), r.vol_hat, t, cfg.tolerances.vol, close(r.vol_hat, t, cfg.tolerances.vol));
        }
        rows.push(json!({"p": r.p, "degree": r.degree, "vol_hat": r.vol_hat, "envelope": r.envelope,
                         "closed_form": exact.as_ref().map(format_rational)}));
    }
    write_csv(cfg, "fujita.csv", &csv)?;
    let mut body = Map::new();
    body.insert("model".into(), serde_json::to_value(&spec).expect("serializable"));
    body.insert("reference".into(), json!({"degree": rep.reference_degree, "vol_hat": rep.reference}));
    body.insert("sup".into(), json!(rep.sup));
    body.insert("rows".into(), Value::Array(rows));
    let (checks, status) = checks.status(Vec::new());
    body.insert("checks".into(), checks);
    write_json(cfg, "fujita.json", body)?;
    Ok(status)
}

fn truncation(cfg: &ExperimentConfig) -> Outcome {
    let (spec, b) = series(cfg)?;
    let xs = cfg
        .xs
        .clone()
        .unwrap_or_else(|| vec![rational(-1, 2), rational(0, 1), rational(1, 2)]);
    let p_list = if cfg.p_list.is_empty() { vec![2] } else { cfg.p_list.clone() };
    let mut subs: Vec<(String, GradedSeries)> = Vec::new();
    for &p in &p_list {
        subs.push((format!("B^({p})"), generated_subalgebra(&b, p)?));
    }
    subs.push(("B^[0]".into(), effective_subseries(&b, &Rational::from_integer(0.into()))?));
    let mut reports = Vec::new();
    for (_, s) in &subs {
        reports.push(truncation_comparison(&b, s, &xs, &cfg.degrees)?);
    }
    let mut body = Map::new();
    body.insert("model".into(), serde_json::to_value(&spec).expect("serializable"));
    body.insert("xs".into(), json!(xs.iter().map(format_rational).collect::<Vec<_>>()));
    body.insert(
        "subseries".into(),
        Value::Array(
            subs.iter()
                .zip(&reports)
                .map(|((name, _), rep)| json!({"name": name, "entries": rep}))
                .collect(),
        ),
    );
    write_json(cfg, "truncation.json", body)?;
    Ok(verdict_of(&reports.iter().collect::<Vec<_>>()))
}

fn metric_compare(cfg: &ExperimentConfig) -> Outcome {
    let (spec, b) = series(cfg)?;
    let perts: Vec<WeightPerturbation> = match &cfg.perturbations {
        Some(ps) => ps
            .iter()
            .map(|p| {
                Ok(WeightPerturbation {
                    degree: p.degree,
                    delta: p.delta.iter().map(|x| x.to_rational()).collect::<Result<_, _>>()?,
                })
            })
            .collect::<Result<_, Error>>()?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let pool: Vec<usize> = if cfg.degrees.is_empty() { (1..=40).collect() } else { cfg.degrees.clone() };
            let mut out = Vec::new();
            for _ in 0..cfg.count.unwrap_or(50) {
                let m = pool[rng.gen_range(0..pool.len())];
                let r = b.rank(m)?;
                out.push(WeightPerturbation {
                    degree: m,
                    delta: (0..r).map(|_| rational(rng.gen_range(0..=8), 4)).collect(),
                });
            }
            out
        }
    };
    let phi = match &cfg.phi {
        Some(p) => PiecewiseLinear::new(
            p.knots
                .iter()
                .map(|(x, y)| Ok((x.to_rational()?, y.to_rational()?)))
                .collect::<Result<_, Error>>()?,
            p.left_slope.to_rational()?,
            p.right_slope.to_rational()?,
        )?,
        None => PiecewiseLinear::min_with(rational(10, 1)),
    };
    let rep = metric_comparison_experiment(&b, &perts, &phi)?;
    let mut body = Map::new();
    body.insert("model".into(), serde_json::to_value(&spec).expect("serializable"));
    body.insert(
        "perturbations".into(),
        Value::Array(
            perts
                .iter()
                .map(|p| json!({"degree": p.degree, "delta": p.delta.iter().map(format_rational).collect::<Vec<_>>()}))
                .collect(),
        ),
    );
    body.insert("entries".into(), serde_json::to_value(&rep).expect("serializable"));
    write_json(cfg, "metric.json", body)?;
    Ok(verdict_of(&[&rep]))
}
