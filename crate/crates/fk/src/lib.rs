//! Scenario runner for `fk-core`.
//!
//! A run reads one TOML config, dispatches to the library, and writes
//! `result.toml` plus one CSV per table into the output directory. See the
//! repository README for the config grammar and file formats.

pub mod config;
pub mod error;
pub mod output;
pub mod plot;
pub mod scenario;

use std::path::PathBuf;
use std::time::Instant;

pub use config::{Overrides, Scenario, ScenarioConfig};
pub use error::CliError;
pub use plot::{emit_plot_data, PlotKind};
pub use scenario::Outcome;

/// What a finished run produced.
#[derive(Debug)]
pub struct RunSummary {
    pub outcome: Outcome,
    pub files: Vec<PathBuf>,
    pub wall_clock_seconds: f64,
}

/// Run `f` on a pool of `workers` threads, or on the global pool.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match workers {
        None => Ok(f()),
        Some(0) => Err(CliError::Validation("--workers: must be positive".into())),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| CliError::Runtime(format!("cannot start worker pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Run a resolved, validated config and write its outputs.
pub fn run(cfg: &ScenarioConfig, workers: Option<usize>) -> Result<RunSummary, CliError> {
    cfg.validate()?;
    let start = Instant::now();
    let (outcome, used) = with_workers(workers, || (scenario::run_scenario(cfg), rayon::current_num_threads()))?;
    let outcome = outcome?;
    let wall_clock_seconds = start.elapsed().as_secs_f64();
    let files = output::write_outputs(cfg, &outcome, wall_clock_seconds, used)?;
    Ok(RunSummary { outcome, files, wall_clock_seconds })
}
