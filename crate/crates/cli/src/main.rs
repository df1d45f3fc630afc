//! `s2`: build S2 topologies and run measurement experiments.
//!
//! Exit status: 0 success, 2 invalid configuration or input, 3 infeasible
//! topology, 4 I/O failure. Failures print one `error[<kind>]: <reason>` line
//! on stderr.

mod args;
mod config;
mod experiments;
mod failure;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use failure::Failure;

/// Overrides the worker thread count.
const WORKERS_ENV: &str = "S2_WORKERS";

fn init_workers() -> Result<(), Failure> {
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Failure::config(format!("{WORKERS_ENV} must be a positive integer, got '{v}'")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::config(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let reason = e.to_string();
            let first = reason.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            eprintln!("{}", Failure::config(first));
            return ExitCode::from(2);
        }
    };
    let result = init_workers().and_then(|_| match cli.command {
        Command::Validate { file } => output::validate(&file),
        Command::Run { config, out } => {
            let text = std::fs::read_to_string(&config).map_err(|e| Failure::io(format!("{}: {e}", config.display())))?;
            let mut cfg = config::ExperimentConfig::from_toml(&text)?;
            if out.is_some() {
                cfg.output.dir = out;
            }
            output::execute(&cfg, None)
        }
        other => {
            let (cfg, topology_out) = other.into_config()?;
            output::execute(&cfg, topology_out.as_deref())
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(f.exit_code())
        }
    }
}
