//! Euler–Maruyama stepping of the Bessel-drift diffusion and of drifted
//! Brownian motion, with on-line accumulation of path functionals and
//! first-exit sampling from balls.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{config, domain, Result};
use crate::math::bessel_drift;
use crate::potential::Potential;
use crate::rng::{path_rng, PathRng};
use crate::stats::{par_fold, Estimate, Moments};
use crate::vec3::Vec3;

/// Largest admissible time step.
pub const MAX_DT: f64 = 1e-2;
/// Tolerance on `|θ| = 1` for constant drifts.
pub const UNIT_TOL: f64 = 1e-12;
/// Exit sampling gives up after `EXIT_CAP_FACTOR · r²` time units.
pub const EXIT_CAP_FACTOR: f64 = 50.0;

/// Drift of the simulated diffusion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriftField {
    /// The ν = 1/2 Bessel-ratio drift `(coth|x| - 1/|x|) x/|x|`.
    Bessel,
    /// A constant unit drift θ.
    Constant(Vec3),
}

impl DriftField {
    pub fn constant(theta: Vec3) -> Result<Self> {
        check_unit(theta)?;
        Ok(DriftField::Constant(theta))
    }

    #[inline]
    pub fn eval(&self, x: Vec3) -> Vec3 {
        match *self {
            DriftField::Bessel => bessel_drift(x),
            DriftField::Constant(theta) => theta,
        }
    }

    /// Start of the unit-drift comparison process below the path's radius:
    /// `|x|` under the radial drift (whose speed `coth r` is at least 1),
    /// `θ·x` under a constant drift.
    pub fn progress(&self, x: Vec3) -> f64 {
        match *self {
            DriftField::Bessel => x.norm(),
            DriftField::Constant(theta) => theta.dot(x),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            DriftField::Bessel => Ok(()),
            DriftField::Constant(theta) => check_unit(theta),
        }
    }
}

pub(crate) fn check_unit(theta: Vec3) -> Result<()> {
    if theta.is_unit(UNIT_TOL) {
        Ok(())
    } else {
        Err(domain(format!("direction must be a unit vector, |θ| = {}", theta.norm())))
    }
}

/// Time discretization and stream selection shared by all samplers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathConfig {
    pub dt: f64,
    /// Horizon standing in for the infinite-time functionals.
    pub t_max: f64,
    /// Radius used to flag a path as escaped at the horizon.
    pub stop_radius: f64,
    pub master_seed: u64,
    /// Start point for exit sampling; amplitude paths always start at 0.
    #[serde(default)]
    pub start: Vec3,
    /// Test for unobserved boundary crossings between grid points with the
    /// Brownian-bridge crossing probability.
    #[serde(default = "default_true")]
    pub bridge_exit: bool,
}

fn default_true() -> bool {
    true
}

impl Default for PathConfig {
    fn default() -> Self {
        Self { dt: 1e-2, t_max: 30.0, stop_radius: 15.0, master_seed: 0x5eed, start: Vec3::ZERO, bridge_exit: true }
    }
}

impl PathConfig {
    pub fn with_seed(mut self, master_seed: u64) -> Self {
        self.master_seed = master_seed;
        self
    }

    pub fn with_start(mut self, start: Vec3) -> Self {
        self.start = start;
        self
    }

    /// Checks for the time step alone (exit sampling ignores the horizon).
    pub fn validate_step(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt <= MAX_DT) {
            return Err(config(format!("dt must lie in (0, {MAX_DT}], got {}", self.dt)));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_step()?;
        if !(self.stop_radius > 0.0) || !self.stop_radius.is_finite() {
            return Err(config(format!("stop_radius must be positive, got {}", self.stop_radius)));
        }
        if !(self.t_max >= 2.0 * self.stop_radius) || !self.t_max.is_finite() {
            return Err(config(format!(
                "t_max must be finite and >= 2 * stop_radius ({}), got {}",
                2.0 * self.stop_radius,
                self.t_max
            )));
        }
        Ok(())
    }

    /// Full steps plus the length of a trailing partial step.
    fn step_plan(&self) -> (u64, f64) {
        let full = (self.t_max / self.dt + 1e-9).floor();
        let rem = self.t_max - full * self.dt;
        let rem = if rem > 1e-9 * self.dt { rem } else { 0.0 };
        (full as u64, rem)
    }
}

/// Path functionals of one trajectory up to the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalSample {
    pub integral_v: f64,
    pub integral_abs_v: f64,
    pub t_end: f64,
    pub escaped: bool,
    /// Bound on the expected `∫|V|` beyond the horizon, given the end point.
    pub tail_bound: f64,
    pub end_point: Vec3,
}

#[inline]
pub(crate) fn normal3(rng: &mut PathRng) -> Vec3 {
    Vec3::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Step a path from the origin to `cfg.t_max`, calling `visit(h, x)` after
/// every step of length `h` landing at `x`. Returns the final point.
#[inline]
pub(crate) fn walk<F: FnMut(f64, Vec3)>(drift: &DriftField, cfg: &PathConfig, sample_index: u64, mut visit: F) -> Vec3 {
    let mut rng = path_rng(cfg.master_seed, sample_index);
    let (full, rem) = cfg.step_plan();
    let sq = cfg.dt.sqrt();
    let mut x = Vec3::ZERO;
    for _ in 0..full {
        x = x + drift.eval(x) * cfg.dt + normal3(&mut rng) * sq;
        visit(cfg.dt, x);
    }
    if rem > 0.0 {
        x = x + drift.eval(x) * rem + normal3(&mut rng) * rem.sqrt();
        visit(rem, x);
    }
    x
}

/// Simulate one path from the origin and accumulate `∫V` and `∫|V|` by the
/// trapezoidal rule on the step points.
pub fn simulate_functional(
    drift: &DriftField,
    v: &Potential,
    cfg: &PathConfig,
    sample_index: u64,
) -> Result<FunctionalSample> {
    drift.validate()?;
    cfg.validate()?;
    Ok(functional_unchecked(drift, v, cfg, sample_index))
}

#[inline]
pub(crate) fn functional_unchecked(
    drift: &DriftField,
    v: &Potential,
    cfg: &PathConfig,
    sample_index: u64,
) -> FunctionalSample {
    let mut prev = v.eval(Vec3::ZERO);
    let (mut iv, mut iabs) = (0.0, 0.0);
    let end = walk(drift, cfg, sample_index, |h, x| {
        let cur = v.eval(x);
        iv += 0.5 * h * (prev + cur);
        iabs += 0.5 * h * (prev.abs() + cur.abs());
        prev = cur;
    });
    let r_end = end.norm();
    FunctionalSample {
        integral_v: iv,
        integral_abs_v: iabs,
        t_end: cfg.t_max,
        escaped: r_end > cfg.stop_radius,
        tail_bound: v.tail_mass(drift.progress(end)),
        end_point: end,
    }
}

/// One first-exit sample of `∫_0^T exp(-(i/2)∫_0^t V) F(G_t) dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExitSample {
    pub value: Complex64,
    pub exit_time: f64,
    /// The path was still inside the ball at the time cap.
    pub capped: bool,
}

/// Fraction `s ∈ [0, 1]` along `a → b` where `|a + s(b - a)| = r`, given
/// `|a| < r <= |b|`.
pub(crate) fn sphere_crossing(a: Vec3, b: Vec3, r: f64) -> f64 {
    let d = b - a;
    let (qa, qb, qc) = (d.norm_sq(), 2.0 * a.dot(d), a.norm_sq() - r * r);
    if qa == 0.0 {
        return 1.0;
    }
    let disc = (qb * qb - 4.0 * qa * qc).max(0.0);
    // qc < 0 so the roots have opposite signs; take the positive one
    let s = (-qb + disc.sqrt()) / (2.0 * qa);
    s.clamp(0.0, 1.0)
}

/// Walk from `cfg.start` until the path leaves the open ball of radius `r`,
/// integrating the complex Feynman–Kac weight against `F`. The boundary
/// crossing inside the final step is located by linear interpolation; with
/// `cfg.bridge_exit` an excursion between two interior points is detected
/// with probability `exp(-2 d₀ d₁ / dt)` (`d` = distance to the sphere).
pub fn sample_exit(
    r: f64,
    v: &Potential,
    f: &Potential,
    cfg: &PathConfig,
    sample_index: u64,
    drift_on: bool,
) -> Result<ExitSample> {
    check_exit_args(r, cfg)?;
    Ok(exit_unchecked(r, |x| (v.eval(x), f.eval(x)), cfg, sample_index, drift_on))
}

pub(crate) fn check_exit_args(r: f64, cfg: &PathConfig) -> Result<()> {
    cfg.validate_step()?;
    if !(r > 0.0) || !r.is_finite() {
        return Err(domain(format!("ball radius must be positive, got {r}")));
    }
    if !(cfg.start.norm() < r) {
        return Err(domain(format!("start point {:?} is not inside the ball of radius {r}", cfg.start)));
    }
    Ok(())
}

#[inline]
pub(crate) fn phase_weight(phase: f64, f: f64) -> Complex64 {
    // exp(-(i/2) phase), computed so that phase -> -phase conjugates exactly
    let a = -0.5 * phase;
    let (s, c) = a.abs().sin_cos();
    Complex64::new(c * f, s.copysign(a) * f)
}

pub(crate) fn exit_unchecked<E: Fn(Vec3) -> (f64, f64)>(
    r: f64,
    eval: E,
    cfg: &PathConfig,
    sample_index: u64,
    drift_on: bool,
) -> ExitSample {
    let mut rng = path_rng(cfg.master_seed, sample_index);
    let dt = cfg.dt;
    let sq = dt.sqrt();
    let drift = if drift_on { Vec3::E1 * dt } else { Vec3::ZERO };
    let cap = EXIT_CAP_FACTOR * r * r;
    let bridge_window = 20.0 * dt;

    let mut x = cfg.start;
    let (v0, f0) = eval(x);
    let (mut v_prev, mut w_prev) = (v0, phase_weight(0.0, f0));
    let mut phase = 0.0;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut t = 0.0;

    loop {
        let next = x + drift + normal3(&mut rng) * sq;
        let d0 = r - x.norm();
        let d1 = r - next.norm();
        if d1 <= 0.0 {
            let s = sphere_crossing(x, next, r);
            let h = s * dt;
            let xb = x + (next - x) * s;
            let (vb, fb) = eval(xb);
            phase += 0.5 * h * (v_prev + vb);
            acc += (w_prev + phase_weight(phase, fb)) * (0.5 * h);
            t += h;
            return ExitSample { value: acc, exit_time: t, capped: false };
        }
        if cfg.bridge_exit && d0 * d1 < bridge_window {
            let p = (-2.0 * d0 * d1 / dt).exp();
            if rng.random::<f64>() < p {
                // crossing somewhere inside the step; charge half of it
                let h = 0.5 * dt;
                let xm = (x + next) * 0.5;
                let (vm, fm) = eval(xm);
                phase += 0.5 * h * (v_prev + vm);
                acc += (w_prev + phase_weight(phase, fm)) * (0.5 * h);
                t += h;
                return ExitSample { value: acc, exit_time: t, capped: false };
            }
        }
        let (v1, f1) = eval(next);
        phase += 0.5 * dt * (v_prev + v1);
        let w1 = phase_weight(phase, f1);
        acc += (w_prev + w1) * (0.5 * dt);
        v_prev = v1;
        w_prev = w1;
        x = next;
        t += dt;
        if t >= cap {
            return ExitSample { value: acc, exit_time: t, capped: true };
        }
    }
}

/// Monte Carlo estimate of `E[exp(-β T)]` for driftless Brownian motion
/// leaving the ball of radius `r`, started at `cfg.start`.
pub fn exit_time_laplace_check(r: f64, beta: f64, cfg: &PathConfig, n: u64) -> Result<Estimate> {
    check_exit_args(r, cfg)?;
    if !(beta > 0.0) {
        return Err(domain(format!("beta must be positive, got {beta}")));
    }
    if n == 0 {
        return Err(config("sample count must be positive"));
    }
    let m = par_fold(
        n,
        Moments::default,
        |acc, i| {
            let s = exit_unchecked(r, |_| (0.0, 0.0), cfg, i, false);
            acc.push((-beta * s.exit_time).exp());
        },
        |a, b| a.merge(b),
    );
    Ok(Estimate::from_moments(&m, 0.0))
}

/// Mean exit time from the ball, with the number of capped paths.
pub fn exit_time_mean(r: f64, cfg: &PathConfig, n: u64, drift_on: bool) -> Result<(Estimate, u64)> {
    check_exit_args(r, cfg)?;
    if n == 0 {
        return Err(config("sample count must be positive"));
    }
    let (m, capped) = par_fold(
        n,
        || (Moments::default(), 0u64),
        |acc, i| {
            let s = exit_unchecked(r, |_| (0.0, 0.0), cfg, i, drift_on);
            acc.0.push(s.exit_time);
            acc.1 += s.capped as u64;
        },
        |a, b| {
            a.0.merge(b.0);
            a.1 += b.1;
        },
    );
    Ok((Estimate::from_moments(&m, 0.0), capped))
}

/// Per-coordinate statistics of the noise part `Δx - drift·dt` of the steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IncrementStats {
    pub steps: u64,
    pub mean: [f64; 3],
    pub variance: [f64; 3],
}

/// Record `n_paths × steps_per_path` Euler–Maruyama increments from the origin.
pub fn increment_statistics(
    drift: &DriftField,
    cfg: &PathConfig,
    n_paths: u64,
    steps_per_path: u64,
) -> Result<IncrementStats> {
    drift.validate()?;
    cfg.validate_step()?;
    let sq = cfg.dt.sqrt();
    let m = par_fold(
        n_paths,
        || [Moments::default(); 3],
        |acc, i| {
            let mut rng = path_rng(cfg.master_seed, i);
            let mut x = Vec3::ZERO;
            for _ in 0..steps_per_path {
                let mean_step = drift.eval(x) * cfg.dt;
                let next = x + mean_step + normal3(&mut rng) * sq;
                let noise = (next - x - mean_step).to_array();
                for (a, d) in acc.iter_mut().zip(noise) {
                    a.push(d);
                }
                x = next;
            }
        },
        |a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                x.merge(y);
            }
        },
    );
    Ok(IncrementStats {
        steps: m[0].n,
        mean: [m[0].mean, m[1].mean, m[2].mean],
        variance: [m[0].variance(), m[1].variance(), m[2].variance()],
    })
}

/// Fraction of `n` paths with `|x(t_max)| > stop_radius`.
pub fn escape_fraction(drift: &DriftField, cfg: &PathConfig, n: u64) -> Result<f64> {
    drift.validate()?;
    cfg.validate()?;
    let escaped = par_fold(
        n,
        || 0u64,
        |acc, i| {
            let end = walk(drift, cfg, i, |_, _| {});
            *acc += (end.norm() > cfg.stop_radius) as u64;
        },
        |a, b| *a += b,
    );
    Ok(escaped as f64 / n as f64)
}
