//! Experiment configuration: a JSON file merged with command-line overrides.

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use slopekit::filtration::FiltrationJson;
use slopekit::lattice::{LatticeJson, NumOrString, DEFAULT_BUDGET};
use slopekit::models::ModelSpec;
use slopekit::real::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Measure,
    LatticeAudit,
    Trace,
    Fujita,
    Truncation,
    MetricCompare,
}

#[derive(Debug, Parser)]
#[command(name = "slopekit", version, about = "Audits and graded-series experiments on normed lattices")]
pub struct Cli {
    /// Command to run; may instead be given as `command` in the config file.
    pub command: Option<Command>,
    /// JSON experiment config.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    pub degrees: Option<Vec<usize>>,
    #[arg(long = "p", value_delimiter = ',')]
    pub p_list: Option<Vec<usize>>,
    /// Relative tolerance on volume estimates.
    #[arg(long)]
    pub tol_vol: Option<f64>,
    /// Tolerance on the CDF distance to the limit measure.
    #[arg(long)]
    pub tol_cdf: Option<f64>,
    #[arg(long)]
    pub budget_nodes: Option<u64>,
    /// Number of seeded instances (lattice-audit, metric-compare).
    #[arg(long)]
    pub count: Option<usize>,
    /// Omit the generation timestamp so repeated runs are byte-identical.
    #[arg(long)]
    pub no_timestamp: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_tol_vol")]
    pub vol: f64,
    #[serde(default = "default_tol_cdf")]
    pub cdf: f64,
    #[serde(default = "default_tol_identity")]
    pub identity: f64,
}

fn default_tol_vol() -> f64 {
    0.03
}

fn default_tol_cdf() -> f64 {
    0.02
}

fn default_tol_identity() -> f64 {
    0.02
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            vol: default_tol_vol(),
            cdf: default_tol_cdf(),
            identity: default_tol_identity(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationJson {
    pub degree: usize,
    pub delta: Vec<NumOrString>,
}

/// Piecewise-linear test function: knots `[x, y]` plus the slopes beyond them.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhiJson {
    pub knots: Vec<(NumOrString, NumOrString)>,
    pub left_slope: NumOrString,
    pub right_slope: NumOrString,
}

/// Config file contents; every field optional.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub command: Option<Command>,
    pub model: Option<ModelSpec>,
    pub degrees: Option<Vec<usize>>,
    pub p_list: Option<Vec<usize>>,
    pub tolerances: Option<Tolerances>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub budget_nodes: Option<u64>,
    pub count: Option<usize>,
    pub lattice: Option<LatticeJson>,
    pub companion: Option<LatticeJson>,
    pub filtration: Option<FiltrationJson>,
    pub xs: Option<Vec<NumOrString>>,
    pub perturbations: Option<Vec<PerturbationJson>>,
    pub phi: Option<PhiJson>,
}

/// Resolved configuration.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub command: Command,
    pub model: Option<ModelSpec>,
    pub degrees: Vec<usize>,
    pub p_list: Vec<usize>,
    pub tolerances: Tolerances,
    pub out: PathBuf,
    pub seed: u64,
    pub budget_nodes: u64,
    pub count: Option<usize>,
    pub lattice: Option<LatticeJson>,
    pub companion: Option<LatticeJson>,
    pub filtration: Option<FiltrationJson>,
    pub xs: Option<Vec<Rational>>,
    pub perturbations: Option<Vec<PerturbationJson>>,
    pub phi: Option<PhiJson>,
    pub timestamp: bool,
}

fn parse_all(xs: &[NumOrString]) -> Result<Vec<Rational>, String> {
    xs.iter().map(|x| x.to_rational().map_err(|e| e.to_string())).collect()
}

/// Command-line flags win over the file.
pub fn resolve(cli: Cli) -> Result<ExperimentConfig, String> {
    let file = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display()))?;
            serde_json::from_str::<ConfigFile>(&text).map_err(|e| format!("bad config {}: {e}", p.display()))?
        }
        None => ConfigFile::default(),
    };
    let command = cli
        .command
        .or(file.command)
        .ok_or_else(|| "no command given (positional argument or `command` in the config)".to_string())?;
    let mut tolerances = file.tolerances.unwrap_or_default();
    if let Some(t) = cli.tol_vol {
        tolerances.vol = t;
    }
    if let Some(t) = cli.tol_cdf {
        tolerances.cdf = t;
    }
    if [tolerances.vol, tolerances.cdf, tolerances.identity].iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err("tolerances must be finite and non-negative".into());
    }
    let seed = cli.seed.or(file.seed).unwrap_or(0);
    let mut model = file.model;
    if let Some(s) = cli.seed {
        match &mut model {
            Some(ModelSpec::RandomLattice { seed, .. }) | Some(ModelSpec::RandomFlag { seed, .. }) => *seed = s,
            _ => {}
        }
    }
    let degrees = cli.degrees.or(file.degrees).unwrap_or_default();
    if matches!(command, Command::Trace | Command::Fujita | Command::Truncation) && degrees.is_empty() {
        return Err("degrees must be non-empty for this command".into());
    }
    Ok(ExperimentConfig {
        command,
        model,
        degrees,
        p_list: cli.p_list.or(file.p_list).unwrap_or_default(),
        tolerances,
        out: cli.out.or(file.out).unwrap_or_else(|| PathBuf::from(".")),
        seed,
        budget_nodes: cli.budget_nodes.or(file.budget_nodes).unwrap_or(DEFAULT_BUDGET),
        count: cli.count.or(file.count),
        lattice: file.lattice,
        companion: file.companion,
        filtration: file.filtration,
        xs: file.xs.as_deref().map(parse_all).transpose()?,
        perturbations: file.perturbations,
        phi: file.phi,
        timestamp: !cli.no_timestamp,
    })
}
