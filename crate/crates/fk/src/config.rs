//! Scenario configuration: parsing, defaults, overrides and validation.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use fk_core::sde::{DriftField, PathConfig, UNIT_TOL};
use fk_core::{make_standard_potential, Potential, PotentialKind, Vec3};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, CliError};

/// Environment variable that overrides `run.master_seed`.
pub const SEED_ENV: &str = "FK_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    AmplitudeScan,
    SphereIdentity,
    RhoSweep,
    Decoupling,
    Threshold,
    Prop11Crosscheck,
    EngineValidation,
    Summability,
}

impl Scenario {
    pub const ALL: [Scenario; 8] = [
        Scenario::AmplitudeScan,
        Scenario::SphereIdentity,
        Scenario::RhoSweep,
        Scenario::Decoupling,
        Scenario::Threshold,
        Scenario::Prop11Crosscheck,
        Scenario::EngineValidation,
        Scenario::Summability,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::AmplitudeScan => "amplitude_scan",
            Scenario::SphereIdentity => "sphere_identity",
            Scenario::RhoSweep => "rho_sweep",
            Scenario::Decoupling => "decoupling",
            Scenario::Threshold => "threshold",
            Scenario::Prop11Crosscheck => "prop11_crosscheck",
            Scenario::EngineValidation => "engine_validation",
            Scenario::Summability => "summability",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Scenario::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Scenario::ALL.iter().map(|k| k.name()).collect();
            invalid(format!("unknown scenario `{s}`; valid scenarios are: {}", names.join(", ")))
        })
    }
}

/// A standard potential by kind and parameter list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    pub params: Vec<f64>,
}

impl Default for PotentialSpec {
    fn default() -> Self {
        Self { kind: PotentialKind::Constant, params: vec![0.0] }
    }
}

impl PotentialSpec {
    pub fn build(&self) -> Result<Potential, CliError> {
        make_standard_potential(self.kind, &self.params).map_err(CliError::from)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriftChoice {
    /// Constant unit drift along the first entry of `directions`.
    Constant,
    Bessel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridExport {
    Csv,
    Binary,
}

/// Numeric run parameters. Each scenario reads the subset it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunParams {
    pub n: u64,
    /// Sample count for the Bessel-drift side of `sphere_identity`.
    /// Defaults to `n * n_dirs`.
    pub n_bessel: Option<u64>,
    pub dt: f64,
    pub t_max: f64,
    pub stop_radius: f64,
    pub master_seed: u64,
    pub bridge_exit: bool,
    pub directions: Vec<[f64; 3]>,
    pub n_dirs: usize,
    /// Defaults to 21 evenly spaced points on `[-c, c]`.
    pub lambda_grid: Vec<f64>,
    pub rho_list: Vec<f64>,
    pub c: f64,
    pub rho: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    #[serde(rename = "R1")]
    pub r1: f64,
    #[serde(rename = "R2")]
    pub r2: f64,
    /// Defaults to `[R2]`.
    #[serde(rename = "R2_sweep")]
    pub r2_sweep: Vec<f64>,
    pub r: f64,
    pub h: f64,
    pub x: [f64; 3],
    pub drift_on: bool,
    pub beta: f64,
    pub increment_paths: u64,
    pub increment_steps: u64,
    pub bins: usize,
    pub drift: DriftChoice,
    pub export_grid: Option<GridExport>,
}

impl Default for RunParams {
    fn default() -> Self {
        let path = PathConfig::default();
        Self {
            n: 10_000,
            n_bessel: None,
            dt: path.dt,
            t_max: path.t_max,
            stop_radius: path.stop_radius,
            master_seed: 0,
            bridge_exit: true,
            directions: vec![[1.0, 0.0, 0.0]],
            n_dirs: 64,
            lambda_grid: Vec::new(),
            rho_list: vec![2.0, 4.0, 8.0, 16.0],
            c: 1.0,
            rho: 16.0,
            big_r: 32.0,
            r1: 6.0,
            r2: 20.0,
            r2_sweep: Vec::new(),
            r: 1.0,
            h: 0.05,
            x: [0.0; 3],
            drift_on: true,
            beta: 0.5,
            increment_paths: 1000,
            increment_steps: 1000,
            bins: 40,
            drift: DriftChoice::Constant,
            export_grid: None,
        }
    }
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("fk-out")
}

/// One experiment: which scenario, on which potential, with which numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub potential: PotentialSpec,
    /// Source term `F` for `prop11_crosscheck`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<PotentialSpec>,
    #[serde(default)]
    pub run: RunParams,
}

/// Command-line overrides, applied after the file and `FK_SEED`.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
}

/// Seeds are stored as TOML integers, which are signed 64-bit.
const MAX_SEED: u64 = i64::MAX as u64;

/// Evenly spaced grid on `[-c, c]`; the midpoint is exactly 0 and the grid
/// is exactly symmetric.
pub fn symmetric_grid(c: f64, points: usize) -> Vec<f64> {
    let half = (points / 2) as i64;
    (-half..=half).map(|k| c * k as f64 / half as f64).collect()
}

fn check_dir(path: &str, d: [f64; 3]) -> Result<Vec3, CliError> {
    let v = Vec3::from_array(d);
    if !v.is_unit(UNIT_TOL) {
        return Err(invalid(format!("{path}: direction {d:?} is not a unit vector")));
    }
    Ok(v)
}

fn positive(path: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{path}: must be positive and finite, got {x}")))
    }
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        if let Ok(table) = text.parse::<toml::Table>() {
            if let Some(toml::Value::String(s)) = table.get("scenario") {
                s.parse::<Scenario>()?;
            }
        }
        toml::from_str(text).map_err(|e| invalid(format!("malformed config: {e}")))
    }

    /// Read, apply `FK_SEED` and `overrides`, fill derived defaults.
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self, CliError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        if let Ok(s) = std::env::var(SEED_ENV) {
            cfg.run.master_seed =
                s.trim().parse().map_err(|_| invalid(format!("{SEED_ENV}: not an unsigned integer: {s:?}")))?;
        }
        cfg.apply(overrides);
        cfg.resolve();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(s) = o.seed {
            self.run.master_seed = s;
        }
        if let Some(d) = &o.out_dir {
            self.out_dir = d.clone();
        }
    }

    /// Replace empty defaults by their derived values. Idempotent.
    pub fn resolve(&mut self) {
        let run = &mut self.run;
        if run.lambda_grid.is_empty() {
            run.lambda_grid = symmetric_grid(run.c, 21);
        }
        if run.r2_sweep.is_empty() {
            run.r2_sweep = vec![run.r2];
        }
        if run.n_bessel.is_none() && self.scenario == Scenario::SphereIdentity {
            run.n_bessel = Some(run.n.saturating_mul(run.n_dirs as u64));
        }
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Runtime(format!("cannot serialize config: {e}")))
    }

    pub fn path_config(&self) -> PathConfig {
        PathConfig {
            dt: self.run.dt,
            t_max: self.run.t_max,
            stop_radius: self.run.stop_radius,
            master_seed: self.run.master_seed,
            bridge_exit: self.run.bridge_exit,
            ..PathConfig::default()
        }
    }

    pub fn directions(&self) -> Result<Vec<Vec3>, CliError> {
        if self.run.directions.is_empty() {
            return Err(invalid("run.directions: need at least one direction"));
        }
        self.run.directions.iter().enumerate().map(|(i, &d)| check_dir(&format!("run.directions[{i}]"), d)).collect()
    }

    pub fn drift(&self) -> Result<DriftField, CliError> {
        Ok(match self.run.drift {
            DriftChoice::Bessel => DriftField::Bessel,
            DriftChoice::Constant => DriftField::Constant(self.directions()?[0]),
        })
    }

    /// Check every parameter the chosen scenario consumes.
    pub fn validate(&self) -> Result<(), CliError> {
        let run = &self.run;
        if run.master_seed > MAX_SEED {
            return Err(invalid(format!("run.master_seed: must be at most {MAX_SEED}, got {}", run.master_seed)));
        }
        if run.n == 0 {
            return Err(invalid("run.n: must be positive"));
        }
        self.potential.build().map_err(|e| invalid(format!("potential: {e}")))?;
        let path = self.path_config();
        let needs_paths = self.scenario != Scenario::Prop11Crosscheck && self.scenario != Scenario::EngineValidation;
        if needs_paths {
            path.validate().map_err(|e| invalid(format!("run: {e}")))?;
        } else {
            path.validate_step().map_err(|e| invalid(format!("run: {e}")))?;
        }
        match self.scenario {
            Scenario::AmplitudeScan => {
                self.directions()?;
            }
            Scenario::SphereIdentity => {
                if run.n_dirs < 12 {
                    return Err(invalid(format!("run.n_dirs: need at least 12, got {}", run.n_dirs)));
                }
                if run.n_bessel == Some(0) {
                    return Err(invalid("run.n_bessel: must be positive"));
                }
            }
            Scenario::RhoSweep => {
                self.directions()?;
                if !(run.c >= 0.0 && run.c.is_finite()) {
                    return Err(invalid(format!("run.c: must be finite and >= 0, got {}", run.c)));
                }
                if run.rho_list.is_empty() {
                    return Err(invalid("run.rho_list: need at least one radius"));
                }
                for (i, &rho) in run.rho_list.iter().enumerate() {
                    if !(rho > 1.0 && rho.is_finite()) {
                        return Err(invalid(format!("run.rho_list[{i}]: truncation radius must exceed 1, got {rho}")));
                    }
                }
            }
            Scenario::Decoupling => {
                self.directions()?;
                if !(run.r1 > 2.0) {
                    return Err(invalid(format!("run.R1: must exceed 2, got {}", run.r1)));
                }
                for (i, &r2) in run.r2_sweep.iter().enumerate() {
                    if !(r2 > run.r1 && r2.is_finite()) {
                        return Err(invalid(format!("run.R2_sweep[{i}]: must exceed R1 = {}, got {r2}", run.r1)));
                    }
                    if !(run.stop_radius >= r2) {
                        return Err(invalid(format!(
                            "run.stop_radius: paths must reach R2 = {r2}, got stop_radius = {}",
                            run.stop_radius
                        )));
                    }
                }
            }
            Scenario::Threshold => {
                self.directions()?;
                positive("run.c", run.c)?;
                if !(run.rho > 1.0 && run.rho.is_finite()) {
                    return Err(invalid(format!("run.rho: must exceed 1, got {}", run.rho)));
                }
                if !(run.big_r > run.rho && run.big_r.is_finite()) {
                    return Err(invalid(format!("run.R: must exceed rho = {}, got {}", run.rho, run.big_r)));
                }
                for (i, &l) in run.lambda_grid.iter().enumerate() {
                    if !(l.abs() <= run.c) {
                        return Err(invalid(format!(
                            "run.lambda_grid[{i}]: {l} lies outside [-c, c] with c = {}",
                            run.c
                        )));
                    }
                }
            }
            Scenario::Prop11Crosscheck => {
                let src = self.source.as_ref().ok_or_else(|| invalid("source: required by prop11_crosscheck"))?;
                src.build().map_err(|e| invalid(format!("source: {e}")))?;
                self.check_ball()?;
                if !(Vec3::from_array(run.x).norm() < run.r) {
                    return Err(invalid(format!("run.x: {:?} is not inside the ball of radius {}", run.x, run.r)));
                }
            }
            Scenario::EngineValidation => {
                self.check_ball()?;
                positive("run.beta", run.beta)?;
                if run.increment_paths == 0 || run.increment_steps == 0 {
                    return Err(invalid("run.increment_paths, run.increment_steps: must be positive"));
                }
                let half = 0.5 * run.h;
                let cells = 2.0 * run.r / half;
                if (cells - cells.round()).abs() > 1e-9 * cells {
                    return Err(invalid(format!("run.h: h/2 = {half} must divide the diameter {}", 2.0 * run.r)));
                }
            }
            Scenario::Summability => {
                self.drift()?;
                if run.bins == 0 {
                    return Err(invalid("run.bins: must be positive"));
                }
            }
        }
        Ok(())
    }

    fn check_ball(&self) -> Result<(), CliError> {
        let run = &self.run;
        positive("run.r", run.r)?;
        positive("run.h", run.h)?;
        if run.h > run.r / 10.0 {
            return Err(invalid(format!("run.h: must be at most r/10 = {}, got {}", run.r / 10.0, run.h)));
        }
        let cells = 2.0 * run.r / run.h;
        if (cells - cells.round()).abs() > 1e-9 * cells {
            return Err(invalid(format!("run.h: {} does not divide the diameter {}", run.h, 2.0 * run.r)));
        }
        Ok(())
    }
}
