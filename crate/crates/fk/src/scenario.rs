//! Scenario dispatch. Each runner calls into `fk_core` and packages the
//! report, the tabular outputs and the named pass/fail checks.

use std::collections::BTreeMap;

use fk_core::amplitudes::{
    decoupling_check, estimate_a, estimate_bessel_expectation, rho_sweep, sphere_average_a, summability_histogram,
    threshold_implication, DecouplingReport, LambdaPoint, RhoPoint, SphereAverage, SummabilityReport, ThresholdReport,
    PREMISE_LEVEL,
};
use fk_core::pde::{analytic_refinement, mc_vs_pde, solve_dirichlet, GridSolution, McPdeReport};
use fk_core::rng::derive_seed;
use fk_core::sde::{exit_time_laplace_check, exit_time_mean, increment_statistics, DriftField, IncrementStats};
use fk_core::{Estimate, Vec3};
use serde::Serialize;

use crate::config::{Scenario, ScenarioConfig};
use crate::error::CliError;

/// A CSV table: file stem, header, and rows of preformatted cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

/// Everything a scenario produces before it is written to disk.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub results: toml::Value,
    pub checks: BTreeMap<String, bool>,
    pub tables: Vec<Table>,
    pub grid: Option<GridSolution>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.values().all(|&b| b)
    }
}

/// Shortest decimal that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x}")
}

fn to_value<T: Serialize>(x: &T) -> Result<toml::Value, CliError> {
    toml::Value::try_from(x).map_err(|e| CliError::Runtime(format!("cannot serialize results: {e}")))
}

fn checks<const N: usize>(items: [(&str, bool); N]) -> BTreeMap<String, bool> {
    items.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn outcome<T: Serialize>(results: &T, checks: BTreeMap<String, bool>, tables: Vec<Table>) -> Result<Outcome, CliError> {
    Ok(Outcome { results: to_value(results)?, checks, tables, grid: None })
}

fn estimate_cells(e: &Estimate) -> [String; 4] {
    [num(e.mean), num(e.stderr), e.n.to_string(), num(e.mean_tail_bound)]
}

fn direction_table(dirs: &[Vec3], est: &[Estimate]) -> Table {
    Table {
        name: "directions".into(),
        header: vec!["direction", "theta_x", "theta_y", "theta_z", "a", "stderr", "n", "mean_tail_bound"],
        rows: dirs
            .iter()
            .zip(est)
            .enumerate()
            .map(|(j, (d, e))| {
                let mut row = vec![j.to_string(), num(d.x), num(d.y), num(d.z)];
                row.extend(estimate_cells(e));
                row
            })
            .collect(),
    }
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Outcome, CliError> {
    match cfg.scenario {
        Scenario::AmplitudeScan => amplitude_scan(cfg),
        Scenario::SphereIdentity => sphere_identity(cfg),
        Scenario::RhoSweep => run_rho_sweep(cfg),
        Scenario::Decoupling => decoupling(cfg),
        Scenario::Threshold => threshold(cfg),
        Scenario::Prop11Crosscheck => prop11(cfg),
        Scenario::EngineValidation => engine_validation(cfg),
        Scenario::Summability => summability(cfg),
    }
}

#[derive(Serialize)]
struct DirectionAmplitude {
    theta: Vec3,
    a: Estimate,
}

#[derive(Serialize)]
struct AmplitudeScan {
    directions: Vec<DirectionAmplitude>,
}

fn amplitude_scan(cfg: &ScenarioConfig) -> Result<Outcome, CliError> {
    let v = cfg.potential.build()?;
    let path = cfg.path_config();
    let dirs = cfg.directions()?;
    let est = dirs.iter().map(|&t| estimate_a(t, &v, cfg.run.n, &path)).collect::<Result<Vec<_>, _>>()?;
    let report = AmplitudeScan {
        directions: dirs.iter().zip(&est).map(|(&theta, &a)| DirectionAmplitude { theta, a }).collect(),
    };
    let positive = est.iter().all(|e| e.mean > 0.0);
    let bounded = est.iter().all(|e| e.mean <= 1.0);
    outcome(&report, checks([("positive", positive), ("at_most_one", bounded)]), vec![direction_table(&dirs, &est)])
}

#[derive(Serialize)]
struct SphereIdentity {
    sphere: SphereAverage,
    bessel: Estimate,
    difference: f64,
    combined_stderr: f64,
}

/// Stream tag for the Bessel side, disjoint from the direction tags.
const BESSEL_TAG: u64 = u64::MAX;

fn sphere_identity(cfg: &ScenarioConfig) -> Result<Outcome, CliError> {
    let v = cfg.potential.build()?;
    let path = cfg.path_config();
    let sphere = sphere_average_a(&v, cfg.run.n_dirs, cfg.run.n, &path)?;
    let n_bessel = cfg.run.n_bessel.unwrap_or(cfg.run.n * cfg.run.n_dirs as u64);
    let bessel = estimate_bessel_expectation(&v, n_bessel, &path.with_seed(derive_seed(path.master_seed, BESSEL_TAG)))?;
    let table = direction_table(&sphere.directions, &sphere.per_direction);
    let report = SphereIdentity {
        difference: sphere.average.mean - bessel.mean,
        combined_stderr: sphere.average.stderr.hypot(bessel.stderr),
        sphere,
        bessel,
    };
    let agree = report.sphere.average.agrees_with(&report.bessel, 3.0);
    outcome(&report, checks([("agree_within_3_sigma", agree)]), vec![table])
}

#[derive(Serialize)]
struct RhoSweep {
    theta: Vec3,
    coupling: f64,
    points: Vec<RhoPoint>,
}

fn run_rho_sweep(cfg: &ScenarioConfig) -> Result<Outcome, CliError> {
    let v = cfg.potential.build()?;
    let theta = cfg.directions()?[0];
    let points = rho_sweep(&v, theta, &cfg.run.rho_list, cfg.run.c, cfg.run.n, &cfg.path_config())?;
    let mut sorted = points.clone();
    sorted.sort_by(|a, b| a.rho.total_cmp(&b.rho));
    let nondecreasing = sorted.windows(2).all(|w| w[1].estimate.mean >= w[0].estimate.mean);
    let last = sorted.last().map_or(0.0, |p| p.estimate.mean);
    let table = Table {
        name: "rho_sweep".into(),
        header: vec!["rho", "a", "stderr", "n", "mean_tail_bound"],
        rows: points
            .iter()
            .map(|p| {
                let mut row = vec![num(p.rho)];
                row.extend(estimate_cells(&p.estimate));
                row
            })
            .collect(),
    };
    let report = RhoSweep { theta, coupling: cfg.run.c, points };
    outcome(
        &report,
        checks([("nondecreasing", nondecreasing), ("final_above_premise", last > PREMISE_LEVEL)]),
        vec![table],
    )
}

#[derive(Serialize)]
struct Decoupling {
    theta: Vec3,
    reports: Vec<DecouplingReport>,
}

fn decoupling(cfg: &ScenarioConfig) -> Result<Outcome, CliError> {
    let v = cfg.potential.build()?;
    let theta = cfg.directions()?[0];
    let path = cfg.path_config();
    let mut sweep = cfg.run.r2_sweep.clone();
    sweep.sort_by(f64::total_cmp);
    let reports = sweep
        .iter()
        .map(|&r2| decoupling_check(&v, cfg.run.r1, r2, theta, cfg.run.n, &path))
        .collect::<Result<Vec<_>, _>>()?;
    let inequality = reports.iter().all(|r| r.inequality_holds);
    let shrinking = reports.windows(2).all(|w| w[1].gap <= w[0].gap);
    let table = Table {
        name: "decoupling".into(),
        header: vec![
            "R1",
            "R2",
            "nested",
            "nested_stderr",
            "full",
            "full_stderr",
            "factored",
            "factored_stderr",
            "gap",
            "n",
            "mean_tail_bound",
            "unhit",
        ],
        rows: reports
            .iter()
            .map(|r| {
                vec![
                    num(r.r1),
                    num(r.r2),
                    num(r.nested.mean),
                    num(r.nested.stderr),
                    num(r.full.mean),
                    num(r.full.stderr),
                    num(r.factored.mean),
                    num(r.factored.stderr),
                    num(r.gap),
                    r.nested.n.to_string(),
                    num(r.nested.mean_tail_bound),
                    r.unhit.to_string(),
                ]
            })
            .collect(),
    };
    let report = Decoupling { theta, reports };
    outcome(&report, checks([("inequality", inequality), ("gap_shrinks", shrinking)]), vec![table])
}

pub(crate) fn lambda_table(points: &[LambdaPoint]) -> Table {
    Table {
        name: "lambda".into(),
        header: vec!["lambda", "re", "im", "modulus", "stderr_modulus", "n", "mean_tail_bound", "above_half"],
        rows: points
            .iter()
            .map(|p| {
                vec![
                    num(p.lambda),
                    num(p.b.mean.re),
                    num(p.b.mean.im),
                    num(p.modulus),
                    num(p.modulus_stderr),
                    p.b.n.to_string(),
                    num(p.b.mean_tail_bound),
                    p.above_half.to_string(),
                ]
            })
            .collect(),
    }
}

#[derive(Serialize)]
struct Threshold {
    theta: Vec3,
    report: ThresholdReport,
}

fn threshold(cfg: &ScenarioConfig) -> Result<Outcome, CliError> {
    let v = cfg.potential.build()?;
    let theta = cfg.directions()?[0];
    let run = &cfg.run;
    let report =
        threshold_implication(&v, theta, run.c, &run.lambda_grid, run.rho, run.big_r, run.n, &cfg.path_config())?;
    let zero_exact = report.points.iter().filter(|p| p.lambda == 0.0).all(|p| p.b.mean.re == 1.0 && p.b.mean.im == 0.0);
    let c = checks([
        ("premise", report.premise_holds),
        ("conclusion", report.conclusion_holds),
        ("implication", report.implication_holds),
        ("lambda_zero_exact", zero_exact),
    ]);
    let table = lambda_table(&report.points);
    outcome(&Threshold { theta, report }, c, vec![table])
}

fn prop11(cfg: &ScenarioConfig) -> Result<Outcome, CliError> {
    let v = cfg.potential.build()?;
    let f = cfg.source.as_ref().ok_or_else(|| CliError::Validation("source: required".into()))?.build()?;
    let run = &cfg.run;
    let x = Vec3::from_array(run.x);
    let report: McPdeReport = mc_vs_pde(&v, &f, run.r, x, run.h, run.n, &cfg.path_config(), run.drift_on)?;
    let mut out = outcome(&report, checks([("within_5_percent", report.rel_diff <= 0.05)]), Vec::new())?;
    if run.export_grid.is_some() {
        out.grid = Some(solve_dirichlet(&v, &f, run.r, run.h, run.drift_on)?);
    }
    Ok(out)
}

#[derive(Serialize)]
struct AnchorCheck {
    estimate: Estimate,
    expected: f64,
    relative_error: f64,
    capped_paths: u64,
}

impl AnchorCheck {
    /// Within `max(3 σ, 1%)` of the closed form.
    fn passes(&self) -> bool {
        (self.estimate.mean - self.expected).abs() <= (3.0 * self.estimate.stderr).max(0.01 * self.expected.abs())
    }
}

#[derive(Serialize)]
struct Refinement {
    h: Vec<f64>,
    max_error: Vec<f64>,
    ratio: f64,
}

#[derive(Serialize)]
struct EngineValidation {
    r: f64,
    beta: f64,
    exit_mean: AnchorCheck,
    laplace: AnchorCheck,
    increments: IncrementStats,
    increment_relative_error: f64,
    fd_refinement: Refinement,
}

/// Exit-time anchors, increment statistics and the FD convergence rate.
fn engine_validation(cfg: &ScenarioConfig) -> Result<Outcome, CliError> {
    let run = &cfg.run;
    let path = cfg.path_config();
    let r = run.r;
    let (mean, capped) = exit_time_mean(r, &path, run.n, false)?;
    let exit_mean = AnchorCheck {
        estimate: mean,
        expected: r * r / 3.0,
        relative_error: mean.mean / (r * r / 3.0) - 1.0,
        capped_paths: capped,
    };
    let lap = exit_time_laplace_check(r, run.beta, &path.with_seed(derive_seed(path.master_seed, 1)), run.n)?;
    let s = r * (2.0 * run.beta).sqrt();
    let expected = s / s.sinh();
    let laplace = AnchorCheck { estimate: lap, expected, relative_error: lap.mean / expected - 1.0, capped_paths: 0 };
    let inc_path = path.with_seed(derive_seed(path.master_seed, 2));
    let increments =
        increment_statistics(&DriftField::Constant(Vec3::E1), &inc_path, run.increment_paths, run.increment_steps)?;
    let increment_relative_error = increments.variance.iter().map(|v| (v / run.dt - 1.0).abs()).fold(0.0, f64::max);
    let errs = analytic_refinement(r, &[run.h, 0.5 * run.h])?;
    let ratio = errs[0].1 / errs[1].1;
    let report = EngineValidation {
        r,
        beta: run.beta,
        exit_mean,
        laplace,
        increments,
        increment_relative_error,
        fd_refinement: Refinement {
            h: errs.iter().map(|e| e.0).collect(),
            max_error: errs.iter().map(|e| e.1).collect(),
            ratio,
        },
    };
    let c = checks([
        ("exit_mean", report.exit_mean.passes()),
        ("laplace", report.laplace.passes()),
        ("increment_variance", increment_relative_error <= 0.01),
        ("fd_ratio", (3.5..=4.5).contains(&ratio)),
    ]);
    outcome(&report, c, Vec::new())
}

#[derive(Serialize)]
struct Summability {
    drift: String,
    report: SummabilityReport,
}

fn summability(cfg: &ScenarioConfig) -> Result<Outcome, CliError> {
    let v = cfg.potential.build()?;
    let drift = cfg.drift()?;
    let report = summability_histogram(&v, &drift, cfg.run.n, cfg.run.bins, &cfg.path_config())?;
    let table = Table {
        name: "histogram".into(),
        header: vec!["bin_lo", "bin_hi", "count"],
        rows: report
            .counts
            .iter()
            .enumerate()
            .map(|(k, c)| vec![num(report.bin_edges[k]), num(report.bin_edges[k + 1]), c.to_string()])
            .collect(),
    };
    let label = match drift {
        DriftField::Bessel => "bessel".to_string(),
        DriftField::Constant(t) => format!("constant({}, {}, {})", t.x, t.y, t.z),
    };
    let finite = report.tail_bound_quantiles.iter().all(|q| q.1.is_finite());
    outcome(&Summability { drift: label, report }, checks([("finite_tail_bounds", finite)]), vec![table])
}
