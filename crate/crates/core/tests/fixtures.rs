//! Coarse-step estimates against references computed at dt = 1e-5 with the
//! `fine_step_oracle` example (n = 6000, seed 0xf1e). Tests use a different
//! seed, so the two sides are independent.

use fk_core::amplitudes::{estimate_a, estimate_b, estimate_bessel_expectation, summability_histogram};
use fk_core::sde::simulate_functional;
use fk_core::stats::{par_fold, Estimate, Moments};
use fk_core::{make_standard_potential, DriftField, PathConfig, Potential, PotentialKind, Vec3};

/// (mean, stderr) from the oracle run.
const INTEGRAL_V: (f64, f64) = (0.4980459245772842, 0.0037779381121646268);
const A_GAUSS: (f64, f64) = (0.6308009074894451, 0.001986711381246134);
const B_RE: (f64, f64) = (0.8453739264449565, 0.002395846110241105);
const B_IM: (f64, f64) = (-0.45284521724156623, 0.0027642673368430785);
const OCCUPATION: (f64, f64) = (0.4548746161115926, 0.008720664807469249);
const BESSEL: (f64, f64) = (0.6281221218236602, 0.0020137488857605154);

const N: u64 = 20_000;
const SIGMAS: f64 = 3.0;
/// Room for the O(dt) weak error at dt = 1e-3.
const STEP_BIAS: f64 = 2e-3;

fn cfg() -> PathConfig {
    PathConfig { dt: 1e-3, t_max: 4.0, stop_radius: 2.0, master_seed: 0x5eed, ..PathConfig::default() }
}

fn pot(kind: PotentialKind, params: &[f64]) -> Potential {
    make_standard_potential(kind, params).unwrap()
}

fn close(name: &str, got: (f64, f64), want: (f64, f64)) {
    let tol = SIGMAS * got.1.hypot(want.1) + STEP_BIAS;
    assert!((got.0 - want.0).abs() < tol, "{name}: {} vs reference {} (tol {tol})", got.0, want.0);
}

fn pair(e: &Estimate) -> (f64, f64) {
    (e.mean, e.stderr)
}

#[test]
fn integral_of_potential() {
    let v = pot(PotentialKind::GaussianBump, &[1.0, 0.0, 1.0]);
    let drift = DriftField::Constant(Vec3::E1);
    let c = cfg();
    let m = par_fold(
        N,
        Moments::default,
        |acc, i| acc.push(simulate_functional(&drift, &v, &c, i).unwrap().integral_v),
        |a, b| a.merge(b),
    );
    close("integral_v", pair(&Estimate::from_moments(&m, 0.0)), INTEGRAL_V);
}

#[test]
fn amplitude_a() {
    let v = pot(PotentialKind::GaussianBump, &[2.0, 0.0, 1.0]);
    close("a", pair(&estimate_a(Vec3::E1, &v, N, &cfg()).unwrap()), A_GAUSS);
}

#[test]
fn amplitude_b() {
    let v = pot(PotentialKind::GaussianBump, &[2.0, 0.0, 1.0]);
    let b = estimate_b(Vec3::E1, &v, 1.0, 8.0, N, &cfg()).unwrap();
    close("Re b", (b.mean.re, b.stderr_re), B_RE);
    close("Im b", (b.mean.im, b.stderr_im), B_IM);
}

#[test]
fn occupation_of_half_space() {
    let v = pot(PotentialKind::HalfSpace, &[1.0]);
    let r = summability_histogram(&v, &DriftField::Constant(-Vec3::E1), N, 10, &cfg()).unwrap();
    close("occupation", pair(&r.integral), OCCUPATION);
}

#[test]
fn radial_drift_expectation() {
    let v = pot(PotentialKind::GaussianBump, &[2.0, 0.0, 1.0]);
    close("bessel", pair(&estimate_bessel_expectation(&v, N, &cfg()).unwrap()), BESSEL);
}
