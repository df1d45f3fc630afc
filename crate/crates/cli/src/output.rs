use std::fs;
use std::path::Path;
use std::time::Instant;

use serde_json::json;

use s2_core::topology::Topology;
use s2_core::Error;

use crate::config::ExperimentConfig;
use crate::experiments::{self, CSV_SCHEMA_VERSION};
use crate::failure::Failure;

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

/// Runs one experiment, writes its artifacts and prints the summary.
pub fn execute(cfg: &ExperimentConfig, topology_out: Option<&Path>) -> Result<(), Failure> {
    let started = Instant::now();
    let outcome = experiments::run(cfg)?;
    let summary = json!({
        "config": cfg,
        "library_version": s2_core::VERSION,
        "csv_schema_version": CSV_SCHEMA_VERSION,
        "wall_clock_seconds": started.elapsed().as_secs_f64(),
        "results": outcome.results,
    });
    let summary = serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n";

    if let Some(dir) = &cfg.output.dir {
        fs::create_dir_all(dir).map_err(|e| Failure::io(format!("{}: {e}", dir.display())))?;
        for t in &outcome.tables {
            write(&dir.join(format!("{}.csv", t.name)), &t.csv)?;
        }
        write(&dir.join("summary.json"), summary.as_bytes())?;
    }
    match (&outcome.topology, topology_out) {
        (Some(json), Some(path)) => {
            write(path, json.as_bytes())?;
            print!("{summary}");
        }
        // Without a destination, stdout carries the topology itself.
        (Some(json), None) => print!("{json}"),
        (None, _) => print!("{summary}"),
    }
    Ok(())
}

/// Checks a topology file: prints `OK`, or one line per violation and fails.
pub fn validate(path: &Path) -> Result<(), Failure> {
    match Topology::load(path) {
        Ok(_) => {
            println!("OK");
            Ok(())
        }
        Err(Error::Validation(violations)) => {
            for v in &violations {
                println!("{v}");
            }
            Err(Failure::config(format!("{} violation(s) in {}", violations.len(), path.display())))
        }
        Err(Error::Io(e)) => Err(Failure::io(format!("{}: {e}", path.display()))),
        Err(e) => Err(e.into()),
    }
}
