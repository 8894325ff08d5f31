//! Plot-ready CSVs extracted from result files.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use toml::Value;

use crate::error::{invalid, CliError};
use crate::output::{provenance_line, write_table};
use crate::scenario::{num, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// `lambda,modulus,stderr_modulus` from a `threshold` result.
    ModulusVsLambda,
    /// `rho,a,stderr` from a `rho_sweep` result.
    AVsRho,
    /// `direction,a,stderr` from an `amplitude_scan` or `sphere_identity` result.
    AVsDirection,
}

impl PlotKind {
    pub const ALL: [PlotKind; 3] = [PlotKind::ModulusVsLambda, PlotKind::AVsRho, PlotKind::AVsDirection];

    pub fn name(self) -> &'static str {
        match self {
            PlotKind::ModulusVsLambda => "modulus_vs_lambda",
            PlotKind::AVsRho => "a_vs_rho",
            PlotKind::AVsDirection => "a_vs_direction",
        }
    }

    fn scenarios(self) -> &'static [&'static str] {
        match self {
            PlotKind::ModulusVsLambda => &["threshold"],
            PlotKind::AVsRho => &["rho_sweep"],
            PlotKind::AVsDirection => &["amplitude_scan", "sphere_identity"],
        }
    }
}

impl fmt::Display for PlotKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PlotKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        PlotKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            let names: Vec<&str> = PlotKind::ALL.iter().map(|k| k.name()).collect();
            invalid(format!("unknown plot kind `{s}`; valid kinds are: {}", names.join(", ")))
        })
    }
}

fn get<'a>(v: &'a Value, path: &[&str]) -> Result<&'a Value, CliError> {
    path.iter()
        .try_fold(v, |cur, key| cur.get(*key).ok_or_else(|| invalid(format!("result file lacks `{}`", path.join(".")))))
}

fn float(v: &Value, path: &[&str]) -> Result<f64, CliError> {
    match get(v, path)? {
        Value::Float(x) => Ok(*x),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(invalid(format!("`{}` is not a number", path.join(".")))),
    }
}

fn array<'a>(v: &'a Value, path: &[&str]) -> Result<&'a Vec<Value>, CliError> {
    get(v, path)?.as_array().ok_or_else(|| invalid(format!("`{}` is not an array", path.join("."))))
}

/// Build the plot table for `kind` from a parsed result record.
pub fn plot_table(record: &Value, kind: PlotKind) -> Result<Table, CliError> {
    let scenario = get(record, &["scenario"])?.as_str().unwrap_or_default();
    if !kind.scenarios().contains(&scenario) {
        return Err(invalid(format!(
            "plot kind `{kind}` needs a result from {}, got `{scenario}`",
            kind.scenarios().join(" or ")
        )));
    }
    let results = get(record, &["results"])?;
    let (header, rows) = match kind {
        PlotKind::ModulusVsLambda => {
            let rows = array(results, &["report", "points"])?
                .iter()
                .map(|p| {
                    Ok(vec![
                        num(float(p, &["lambda"])?),
                        num(float(p, &["modulus"])?),
                        num(float(p, &["modulus_stderr"])?),
                    ])
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            (vec!["lambda", "modulus", "stderr_modulus"], rows)
        }
        PlotKind::AVsRho => {
            let rows = array(results, &["points"])?
                .iter()
                .map(|p| {
                    Ok(vec![
                        num(float(p, &["rho"])?),
                        num(float(p, &["estimate", "mean"])?),
                        num(float(p, &["estimate", "stderr"])?),
                    ])
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            (vec!["rho", "a", "stderr"], rows)
        }
        PlotKind::AVsDirection => {
            let est: Vec<&Value> = if scenario == "amplitude_scan" {
                array(results, &["directions"])?.iter().map(|d| get(d, &["a"])).collect::<Result<_, _>>()?
            } else {
                array(results, &["sphere", "per_direction"])?.iter().collect()
            };
            let rows = est
                .iter()
                .enumerate()
                .map(|(j, e)| Ok(vec![j.to_string(), num(float(e, &["mean"])?), num(float(e, &["stderr"])?)]))
                .collect::<Result<Vec<_>, CliError>>()?;
            (vec!["direction", "a", "stderr"], rows)
        }
    };
    Ok(Table { name: kind.name().into(), header, rows })
}

/// Write the plot CSV for `kind`. Defaults to `<result dir>/plot_<kind>.csv`.
pub fn emit_plot_data(result_file: &Path, kind: PlotKind, out: Option<&Path>) -> Result<PathBuf, CliError> {
    let text = std::fs::read_to_string(result_file)
        .map_err(|e| invalid(format!("cannot read {}: {e}", result_file.display())))?;
    let record: Value =
        text.parse::<toml::Table>().map(Value::Table).map_err(|e| invalid(format!("malformed result file: {e}")))?;
    let table = plot_table(&record, kind)?;
    let scenario = get(&record, &["scenario"])?.as_str().unwrap_or_default();
    let seed = match get(&record, &["master_seed"])? {
        Value::Integer(i) => *i as u64,
        _ => return Err(invalid("`master_seed` is not an integer")),
    };
    let path = match out {
        Some(p) => p.to_path_buf(),
        None => result_file.parent().unwrap_or(Path::new(".")).join(format!("plot_{kind}.csv")),
    };
    write_table(&path, &provenance_line(scenario, seed), &table)?;
    Ok(path)
}
