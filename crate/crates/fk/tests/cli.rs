use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fk::output::payload;
use fk::ScenarioConfig;
use fk_core::pde::GridSolution;

fn fk(dir: &Path, args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fk"));
    cmd.current_dir(dir).args(args).env_remove("FK_SEED");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const ZERO_SCAN: &str = r#"scenario = "amplitude_scan"
out_dir = "out"

[run]
n = 1500
master_seed = 3
directions = [[1.0, 0.0, 0.0], [0.0, 0.0, -1.0]]
"#;

const SMALL_SWEEP: &str = r#"scenario = "rho_sweep"
out_dir = "sweep"

[potential]
kind = "power_decay"
params = [1.0, 4.0]

[run]
n = 800
t_max = 40.0
stop_radius = 20.0
master_seed = 17
rho_list = [2.0, 4.0, 8.0]
"#;

const SMALL_THRESHOLD: &str = r#"scenario = "threshold"
out_dir = "thr"

[potential]
kind = "gaussian_bump"
params = [2.0, 0.0, 1.0]

[run]
n = 600
t_max = 24.0
stop_radius = 12.0
master_seed = 5
lambda_grid = [-1.0, -0.5, 0.0, 0.5, 1.0]
rho = 2.0
R = 8.0
"#;

#[test]
fn zero_potential_scan_reports_exact_one() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "zero.toml", ZERO_SCAN);
    let o = fk(dir.path(), &["run", "zero.toml"], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("out/result.toml")).unwrap();
    assert!(text.contains("mean = 1.0\n") && text.contains("stderr = 0.0\n"), "{text}");
    assert!(text.contains("master_seed = 3\n"));
    let csv = fs::read_to_string(dir.path().join("out/directions.csv")).unwrap();
    assert!(csv.starts_with("# fk "));
    assert!(csv.contains("master_seed=3"));
    assert!(csv.contains("\n0,1,0,0,1,0,1500,0\n"), "{csv}");
}

#[test]
fn reruns_are_identical_apart_from_run_info() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "sweep.toml", SMALL_SWEEP);
    let mut results = Vec::new();
    for workers in ["1", "3"] {
        let o = fk(dir.path(), &["run", "sweep.toml", "--workers", workers], &[]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let text = fs::read_to_string(dir.path().join("sweep/result.toml")).unwrap();
        let csv = fs::read_to_string(dir.path().join("sweep/rho_sweep.csv")).unwrap();
        results.push((payload(&text).to_string(), csv));
    }
    assert_eq!(results[0], results[1]);
    assert!(!results[0].0.contains("timestamp"));
}

#[test]
fn unknown_scenario_exits_2_listing_names() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.toml", "scenario = \"entropy\"\n");
    let o = fk(dir.path(), &["run", "bad.toml"], &[]);
    assert_eq!(o.status.code(), Some(2));
    let msg = stderr(&o);
    for name in [
        "amplitude_scan",
        "sphere_identity",
        "rho_sweep",
        "decoupling",
        "threshold",
        "prop11_crosscheck",
        "engine_validation",
        "summability",
    ] {
        assert!(msg.contains(name), "{msg}");
    }
}

#[test]
fn malformed_and_invalid_configs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "typed.toml", "scenario = \"rho_sweep\"\n[run]\nn = \"many\"\n");
    let o = fk(dir.path(), &["validate", "typed.toml"], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("run.n") || stderr(&o).contains("n = \"many\""), "{}", stderr(&o));

    write(dir.path(), "dt.toml", "scenario = \"rho_sweep\"\n[run]\ndt = 0.5\n");
    let o = fk(dir.path(), &["run", "dt.toml"], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("run:"), "{}", stderr(&o));

    write(dir.path(), "pot.toml", "scenario = \"summability\"\n[potential]\nkind = \"wedge\"\nparams = []\n");
    let o = fk(dir.path(), &["validate", "pot.toml"], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("power_decay"), "{}", stderr(&o));

    let o = fk(dir.path(), &["run", "missing.toml"], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn seed_precedence_flag_over_env_over_file() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "zero.toml", ZERO_SCAN);
    let o = fk(dir.path(), &["validate", "zero.toml"], &[("FK_SEED", "77")]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("master_seed = 77"));
    let o = fk(dir.path(), &["validate", "zero.toml", "--seed", "78"], &[("FK_SEED", "77")]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("master_seed = 78"));
    let o = fk(dir.path(), &["validate", "zero.toml"], &[("FK_SEED", "x")]);
    assert_eq!(o.status.code(), Some(2));
    let o = fk(dir.path(), &["run", "zero.toml", "--out-dir", "moved"], &[]);
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("moved/result.toml").exists());
}

#[test]
fn config_echo_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "thr.toml", SMALL_THRESHOLD);
    let o = fk(dir.path(), &["run", "thr.toml"], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("thr/result.toml")).unwrap();
    let record: toml::Table = text.parse().unwrap();
    let echo: ScenarioConfig = record["config"].clone().try_into().unwrap();
    let mut resolved = ScenarioConfig::parse(&fs::read_to_string(path).unwrap()).unwrap();
    resolved.resolve();
    assert_eq!(echo, resolved);
    let mut again = echo.clone();
    again.resolve();
    assert_eq!(again, echo);
}

#[test]
fn plot_columns_follow_the_contract() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "thr.toml", SMALL_THRESHOLD);
    write(dir.path(), "sweep.toml", SMALL_SWEEP);
    write(dir.path(), "zero.toml", ZERO_SCAN);
    for cfg in ["thr.toml", "sweep.toml", "zero.toml"] {
        assert_eq!(fk(dir.path(), &["run", cfg], &[]).status.code(), Some(0));
    }
    let cases = [
        ("thr/result.toml", "modulus_vs_lambda", "lambda,modulus,stderr_modulus", 5),
        ("sweep/result.toml", "a_vs_rho", "rho,a,stderr", 3),
        ("out/result.toml", "a_vs_direction", "direction,a,stderr", 2),
    ];
    for (result, kind, header, rows) in cases {
        let o = fk(dir.path(), &["plot", result, "--kind", kind], &[]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let p = Path::new(result).parent().unwrap().join(format!("plot_{kind}.csv"));
        let text = fs::read_to_string(dir.path().join(p)).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with('#'));
        assert_eq!(lines[1], header);
        assert_eq!(lines.len(), rows + 2, "{text}");
    }
    let thr = fs::read_to_string(dir.path().join("thr/plot_modulus_vs_lambda.csv")).unwrap();
    assert!(thr.contains("\n0,1,0\n"), "{thr}");
    let o = fk(dir.path(), &["plot", "sweep/result.toml", "--kind", "modulus_vs_lambda"], &[]);
    assert_eq!(o.status.code(), Some(2));
    let o = fk(dir.path(), &["plot", "sweep/result.toml", "--kind", "histogram"], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn grid_export_reads_back() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"scenario = "prop11_crosscheck"
out_dir = "p"

[potential]
kind = "gaussian_bump"
params = [1.0, 0.0, 1.0]

[source]
kind = "ball_bump"
params = [1.0, 0.0, 1.0]

[run]
n = 400
dt = 0.001
r = 2.0
h = 0.2
export_grid = "binary"
"#;
    write(dir.path(), "p.toml", cfg);
    let o = fk(dir.path(), &["run", "p.toml"], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let header = fs::File::open(dir.path().join("p/grid.hdr")).unwrap();
    let body = fs::File::open(dir.path().join("p/grid.bin")).unwrap();
    let grid = GridSolution::read_binary(std::io::BufReader::new(header), body).unwrap();
    assert_eq!(grid.nodes, 21);
    let text = fs::read_to_string(dir.path().join("p/result.toml")).unwrap();
    let record: toml::Table = text.parse().unwrap();
    let fd = record["results"]["fd"].as_array().unwrap();
    let centre = grid.value_at(fk_core::Vec3::ZERO);
    assert_eq!(fd[0].as_float().unwrap(), centre.re);
    assert_eq!(fd[1].as_float().unwrap(), centre.im);
}

/// Regression against a stored payload. Set `FK_UPDATE_GOLDEN=1` to rewrite.
#[test]
fn golden_rho_sweep_payload() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "sweep.toml", SMALL_SWEEP);
    let o = fk(dir.path(), &["run", "sweep.toml"], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("sweep/result.toml")).unwrap();
    let got = payload(&text);
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/rho_sweep.toml");
    if std::env::var_os("FK_UPDATE_GOLDEN").is_some() {
        fs::create_dir_all(golden.parent().unwrap()).unwrap();
        fs::write(&golden, got).unwrap();
    }
    let want = fs::read_to_string(&golden).expect("golden file present");
    assert_eq!(got, want);
}
