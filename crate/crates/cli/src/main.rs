//! `slopekit`: batch front-end for lattice audits and graded-series experiments.
//!
//! Exit codes: 0 pass, 1 audit failure, 2 tolerance failure, 3 budget exhaustion, 4 config error.

mod commands;
mod config;

use std::process::ExitCode;

use clap::Parser;

use commands::{Failure, Status};

fn main() -> ExitCode {
    let cli = config::Cli::parse();
    let code = match config::resolve(cli) {
        Err(msg) => report(&Failure::config(msg), None),
        Ok(cfg) => match commands::run(&cfg) {
            Ok(Status::Pass) => 0,
            Ok(Status::Failed(f)) | Err(f) => report(&f, Some(&cfg)),
        },
    };
    ExitCode::from(code)
}

/// Prints the failure as JSON on stderr and, when possible, writes `failure.json` next to the outputs.
fn report(f: &Failure, cfg: Option<&config::ExperimentConfig>) -> u8 {
    let json = serde_json::to_string_pretty(&f.to_json()).expect("serializable");
    eprintln!("{json}");
    if let Some(cfg) = cfg {
        if std::fs::create_dir_all(&cfg.out).is_ok() {
            let _ = std::fs::write(cfg.out.join("failure.json"), format!("{json}\n"));
        }
    }
    f.code
}
