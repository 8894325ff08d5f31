//! Result files: one TOML record per run plus one CSV per table.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ScenarioConfig;
use crate::error::CliError;
use crate::scenario::{Outcome, Table};

pub const RESULT_FILE: &str = "result.toml";
/// Header of the volatile trailing section of a result file.
pub const RUN_INFO_HEADER: &str = "[run_info]";

#[derive(Serialize)]
struct ResultRecord<'a> {
    version: &'static str,
    scenario: &'a str,
    master_seed: u64,
    passed: bool,
    checks: &'a BTreeMap<String, bool>,
    config: &'a ScenarioConfig,
    results: &'a toml::Value,
}

#[derive(Serialize)]
struct RunInfo {
    timestamp: u64,
    wall_clock_seconds: f64,
    workers: usize,
}

/// The deterministic part of a result file: everything before `[run_info]`.
pub fn payload(text: &str) -> &str {
    match text.find(&format!("\n{RUN_INFO_HEADER}\n")) {
        Some(i) => &text[..i + 1],
        None => text,
    }
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

/// `# fk <version> scenario=<name> master_seed=<seed>`
pub fn provenance_line(scenario: &str, seed: u64) -> String {
    format!("# fk {} scenario={scenario} master_seed={seed}", env!("CARGO_PKG_VERSION"))
}

pub fn write_table(path: &Path, provenance: &str, table: &Table) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{provenance}")?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(&table.header).map_err(runtime)?;
    for row in &table.rows {
        csv.write_record(row).map_err(runtime)?;
    }
    csv.flush()?;
    Ok(())
}

/// Write the result record, tables and optional grid under `cfg.out_dir`.
/// Returns the paths written, result file first.
pub fn write_outputs(
    cfg: &ScenarioConfig,
    out: &Outcome,
    wall_clock_seconds: f64,
    workers: usize,
) -> Result<Vec<PathBuf>, CliError> {
    let dir = &cfg.out_dir;
    fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
    let seed = cfg.run.master_seed;
    let record = ResultRecord {
        version: env!("CARGO_PKG_VERSION"),
        scenario: cfg.scenario.name(),
        master_seed: seed,
        passed: out.passed(),
        checks: &out.checks,
        config: cfg,
        results: &out.results,
    };
    let body = toml::to_string(&record).map_err(runtime)?;
    let timestamp = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let info = toml::to_string(&RunInfo { timestamp, wall_clock_seconds, workers }).map_err(runtime)?;
    let result_path = dir.join(RESULT_FILE);
    fs::write(&result_path, format!("{body}\n{RUN_INFO_HEADER}\n{info}"))?;
    let mut written = vec![result_path];

    let provenance = provenance_line(cfg.scenario.name(), seed);
    for t in &out.tables {
        let p = dir.join(format!("{}.csv", t.name));
        write_table(&p, &provenance, t)?;
        written.push(p);
    }
    if let (Some(grid), Some(kind)) = (&out.grid, cfg.run.export_grid) {
        match kind {
            crate::config::GridExport::Csv => {
                let p = dir.join("grid.csv");
                let mut w = BufWriter::new(File::create(&p)?);
                writeln!(w, "{provenance}")?;
                grid.write_csv(&mut w)?;
                w.flush()?;
                written.push(p);
            }
            crate::config::GridExport::Binary => {
                let hp = dir.join("grid.hdr");
                let bp = dir.join("grid.bin");
                let mut h = BufWriter::new(File::create(&hp)?);
                grid.write_header(&mut h)?;
                writeln!(h, "master_seed = {seed}")?;
                h.flush()?;
                let mut b = BufWriter::new(File::create(&bp)?);
                grid.write_binary(&mut b)?;
                b.flush()?;
                written.push(hp);
                written.push(bp);
            }
        }
    }
    Ok(written)
}
