//! Command-line verification harness: configuration, suites and reports.

pub mod config;
pub mod error;
pub mod report;
pub mod suites;

use rayon::prelude::*;

use crate::config::Settings;
use crate::error::CliError;
use crate::report::{Provenance, Report, RNG_NAME};
use crate::suites::{run_suite, Model, Suite};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "REFLECTLAB_THREADS";

/// Runs the given suites concurrently and assembles the sorted report.
pub fn run(settings: Settings, suites: &[Suite]) -> Result<Report, CliError> {
    let config = serde_json::to_value(settings.to_file()).expect("config serializes");
    let provenance = Provenance {
        config_sha256: settings.hash(),
        seed: settings.chain.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        rng: RNG_NAME.to_string(),
    };
    let model = Model::new(settings)?;
    let records = suites
        .par_iter()
        .flat_map_iter(|&s| run_suite(s, &model))
        .collect();
    Ok(Report::new(
        provenance,
        suites.iter().map(|s| s.name().to_string()).collect(),
        config,
        records,
    ))
}

/// Installs the global thread pool according to [`THREADS_ENV`].
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| {
            CliError::Config(format!(
                "{THREADS_ENV} must be a positive integer, got {value:?}"
            ))
        })?;
    // A pool may already exist when called twice in one process; keep it.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}
