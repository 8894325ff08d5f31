//! Monte Carlo estimators for the directional amplitudes and the experiments
//! built on them.
//!
//! All estimators are normalized so that `V ≡ 0` gives exactly 1:
//!
//! * `a(θ) = E[exp(-½ ∫|V(G_t)| dt)]` with `G_t = θt + B_t`
//! * `b_R(θ) = E[exp(-(iλ/2) ∫V_R(G_t) dt)]` with `V_R` the inner truncation
//! * the sphere average `(1/4π) ∫ a(θ) dθ` and the Bessel-drift expectation
//!   `E[exp(-½ ∫|V(X_t)| dt)]`, which must agree
//!
//! Estimators sharing a [`PathConfig`] share sample paths, which makes the
//! monotonicity and conjugation relations between them exact.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{config, domain, Result};
use crate::math::cutoff_at;
use crate::potential::{Potential, TruncationMode};
use crate::rng::derive_seed;
use crate::sde::{check_unit, functional_unchecked, phase_weight, walk, DriftField, FunctionalSample, PathConfig};
use crate::sphere::fibonacci_lattice;
use crate::stats::{par_fold, ComplexEstimate, ComplexMoments, Estimate, Moments};
use crate::vec3::Vec3;

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        Err(config("sample count must be positive"))
    } else {
        Ok(())
    }
}

#[derive(Default, Clone, Copy)]
struct RealAcc {
    m: Moments,
    tail: Moments,
}

impl RealAcc {
    fn merge(&mut self, o: RealAcc) {
        self.m.merge(o.m);
        self.tail.merge(o.tail);
    }

    fn estimate(&self) -> Estimate {
        Estimate::from_moments(&self.m, self.tail.mean)
    }
}

/// Mean of `exp(-(c/2) ∫|V|)` over paths of `drift`.
fn real_amplitude(drift: &DriftField, v: &Potential, coupling: f64, n: u64, cfg: &PathConfig) -> Estimate {
    par_fold(
        n,
        RealAcc::default,
        |acc, i| {
            let s = functional_unchecked(drift, v, cfg, i);
            acc.m.push((-0.5 * coupling * s.integral_abs_v).exp());
            acc.tail.push(s.tail_bound);
        },
        |a, b| a.merge(b),
    )
    .estimate()
}

/// `a(θ)`: mean of `exp(-½ ∫|V(G_t)| dt)` for drifted Brownian motion from 0.
pub fn estimate_a(theta: Vec3, v: &Potential, n: u64, cfg: &PathConfig) -> Result<Estimate> {
    check_unit(theta)?;
    check_n(n)?;
    cfg.validate()?;
    Ok(real_amplitude(&DriftField::Constant(theta), v, 1.0, n, cfg))
}

/// `b_R(θ)` at coupling `λ`: mean of `exp(-(iλ/2) ∫V_R(G_t) dt)`, where
/// `V_R` is the inner truncation of `V` at radius `R`.
pub fn estimate_b(
    theta: Vec3,
    v: &Potential,
    lambda: f64,
    radius: f64,
    n: u64,
    cfg: &PathConfig,
) -> Result<ComplexEstimate> {
    Ok(estimate_b_grid(theta, v, &[lambda], radius, n, cfg)?.remove(0))
}

/// [`estimate_b`] for several couplings from one set of paths.
pub fn estimate_b_grid(
    theta: Vec3,
    v: &Potential,
    lambdas: &[f64],
    radius: f64,
    n: u64,
    cfg: &PathConfig,
) -> Result<Vec<ComplexEstimate>> {
    check_unit(theta)?;
    check_n(n)?;
    cfg.validate()?;
    if let Some(l) = lambdas.iter().find(|l| !l.is_finite()) {
        return Err(domain(format!("coupling must be finite, got {l}")));
    }
    let vr = v.truncate(radius, TruncationMode::Inner)?;
    let drift = DriftField::Constant(theta);
    let k = lambdas.len();
    let (moments, tail) = par_fold(
        n,
        || (vec![ComplexMoments::default(); k], Moments::default()),
        |(acc, tail), i| {
            let s = functional_unchecked(&drift, &vr, cfg, i);
            for (m, &l) in acc.iter_mut().zip(lambdas) {
                m.push(phase_weight(l * s.integral_v, 1.0));
            }
            tail.push(s.tail_bound);
        },
        |(a, ta), (b, tb)| {
            for (x, y) in a.iter_mut().zip(b) {
                x.merge(y);
            }
            ta.merge(tb);
        },
    );
    Ok(moments.iter().map(|m| ComplexEstimate::from_moments(m, tail.mean)).collect())
}

/// Mean of `exp(-½ ∫|V(X_t)| dt)` for the Bessel-drift diffusion from 0.
pub fn estimate_bessel_expectation(v: &Potential, n: u64, cfg: &PathConfig) -> Result<Estimate> {
    check_n(n)?;
    cfg.validate()?;
    Ok(real_amplitude(&DriftField::Bessel, v, 1.0, n, cfg))
}

/// Per-direction amplitudes and their equal-weight average over the sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereAverage {
    pub average: Estimate,
    pub directions: Vec<Vec3>,
    pub per_direction: Vec<Estimate>,
}

impl SphereAverage {
    /// Largest gap between two directions, in units of their combined stderr.
    pub fn max_pairwise_gap_sigma(&self) -> f64 {
        let e = &self.per_direction;
        let mut worst = 0.0f64;
        for i in 0..e.len() {
            for j in i + 1..e.len() {
                let s = e[i].stderr.hypot(e[j].stderr);
                let gap = (e[i].mean - e[j].mean).abs();
                let z = if s > 0.0 {
                    gap / s
                } else if gap > 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                };
                worst = worst.max(z);
            }
        }
        worst
    }
}

/// Stream seed for lattice direction `j`.
pub fn direction_seed(master_seed: u64, j: usize) -> u64 {
    derive_seed(master_seed, j as u64)
}

/// `(1/4π) ∫ a(θ) dθ` by an equal-weight Fibonacci lattice of `n_dirs`
/// directions, each estimated from its own family of streams.
pub fn sphere_average_a(v: &Potential, n_dirs: usize, n: u64, cfg: &PathConfig) -> Result<SphereAverage> {
    if n_dirs < 12 {
        return Err(config(format!("need at least 12 directions, got {n_dirs}")));
    }
    check_n(n)?;
    cfg.validate()?;
    let directions = fibonacci_lattice(n_dirs);
    let per_direction: Vec<Estimate> = directions
        .par_iter()
        .enumerate()
        .map(|(j, &theta)| {
            let c = cfg.with_seed(direction_seed(cfg.master_seed, j));
            real_amplitude(&DriftField::Constant(theta), v, 1.0, n, &c)
        })
        .collect();
    let k = n_dirs as f64;
    let mean = per_direction.iter().map(|e| e.mean).sum::<f64>() / k;
    let stderr = per_direction.iter().map(|e| e.stderr * e.stderr).sum::<f64>().sqrt() / k;
    let tail = per_direction.iter().map(|e| e.mean_tail_bound).sum::<f64>() / k;
    Ok(SphereAverage {
        average: Estimate { mean, stderr, n: n * n_dirs as u64, mean_tail_bound: tail },
        directions,
        per_direction,
    })
}

/// The three sides of the decoupling argument for one `(R₁, R₂)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecouplingReport {
    pub r1: f64,
    pub r2: f64,
    /// `E[exp(-½∫_0^{t₁}|V_{R₁/2}|) · exp(-½∫_{t₁}^∞|V^{(R₂)}|)]`
    pub nested: Estimate,
    /// `E[exp(-½∫_0^∞|V|)]`
    pub full: Estimate,
    /// `E[exp(-½∫_0^{t₁}|V_{R₁/2}|)] · γ(R₂)`
    pub factored: Estimate,
    pub first_factor: Estimate,
    /// `E[exp(-½∫_0^∞|V^{(R₂)}|)]`
    pub gamma: Estimate,
    /// `nested >= full - 3σ`
    pub inequality_holds: bool,
    /// `|nested - factored|`
    pub gap: f64,
    /// Paths that never reached the sphere `|x| = R₁` before the horizon.
    pub unhit: u64,
}

#[derive(Default, Clone, Copy)]
struct DecouplingAcc {
    nested: Moments,
    full: Moments,
    first: Moments,
    gamma: Moments,
    tail: Moments,
    unhit: u64,
}

/// Estimate both sides of the decoupling inequality for drifted Brownian
/// motion in direction `θ`. `t₁` is the first step crossing `|x| = R₁`,
/// refined by linear interpolation inside the step.
pub fn decoupling_check(
    v: &Potential,
    r1: f64,
    r2: f64,
    theta: Vec3,
    n: u64,
    cfg: &PathConfig,
) -> Result<DecouplingReport> {
    check_unit(theta)?;
    check_n(n)?;
    cfg.validate()?;
    if !(r1 > 2.0) || !(r2 > r1) || !r2.is_finite() {
        return Err(domain(format!("need 2 < R1 < R2, got R1 = {r1}, R2 = {r2}")));
    }
    let inner_r = 0.5 * r1;
    let drift = DriftField::Constant(theta);
    let acc = par_fold(
        n,
        DecouplingAcc::default,
        |acc, i| {
            let weights = |x: Vec3| {
                let a = v.eval(x).abs();
                let r = x.norm();
                (a * cutoff_at(r, inner_r), a * (1.0 - cutoff_at(r, r2)), a)
            };
            let (mut w_in, mut w_out, mut w_full) = weights(Vec3::ZERO);
            let mut prev = Vec3::ZERO;
            let (mut first, mut second, mut gamma, mut full) = (0.0, 0.0, 0.0, 0.0);
            let mut hit = false;
            let end = walk(&drift, cfg, i, |h, x| {
                let (c_in, c_out, c_full) = weights(x);
                full += 0.5 * h * (w_full + c_full);
                gamma += 0.5 * h * (w_out + c_out);
                if hit {
                    second += 0.5 * h * (w_out + c_out);
                } else if x.norm() >= r1 {
                    hit = true;
                    let s = crate::sde::sphere_crossing(prev, x, r1);
                    let (m_in, m_out, _) = weights(prev + (x - prev) * s);
                    first += 0.5 * s * h * (w_in + m_in);
                    second += 0.5 * (1.0 - s) * h * (m_out + c_out);
                } else {
                    first += 0.5 * h * (w_in + c_in);
                }
                w_in = c_in;
                w_out = c_out;
                w_full = c_full;
                prev = x;
            });
            let f1 = (-0.5 * first).exp();
            acc.nested.push(f1 * (-0.5 * second).exp());
            acc.full.push((-0.5 * full).exp());
            acc.first.push(f1);
            acc.gamma.push((-0.5 * gamma).exp());
            acc.tail.push(v.tail_mass(drift.progress(end)));
            acc.unhit += (!hit) as u64;
        },
        |a, b| {
            a.nested.merge(b.nested);
            a.full.merge(b.full);
            a.first.merge(b.first);
            a.gamma.merge(b.gamma);
            a.tail.merge(b.tail);
            a.unhit += b.unhit;
        },
    );
    let tail = acc.tail.mean;
    let nested = Estimate::from_moments(&acc.nested, tail);
    let full = Estimate::from_moments(&acc.full, tail);
    let first_factor = Estimate::from_moments(&acc.first, 0.0);
    let gamma = Estimate::from_moments(&acc.gamma, tail);
    let factored = Estimate {
        mean: first_factor.mean * gamma.mean,
        stderr: (gamma.mean * first_factor.stderr).hypot(first_factor.mean * gamma.stderr),
        n,
        mean_tail_bound: tail,
    };
    Ok(DecouplingReport {
        r1,
        r2,
        inequality_holds: nested.mean >= full.mean - 3.0 * nested.stderr.hypot(full.stderr),
        gap: (nested.mean - factored.mean).abs(),
        nested,
        full,
        factored,
        first_factor,
        gamma,
        unhit: acc.unhit,
    })
}

/// One entry of a ρ-sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoPoint {
    pub rho: f64,
    pub estimate: Estimate,
}

/// `E[exp(-(c/2) ∫|V^{(ρ)}(G_t)| dt)]` for each `ρ`, all on the same paths.
pub fn rho_sweep(
    v: &Potential,
    theta: Vec3,
    rhos: &[f64],
    coupling: f64,
    n: u64,
    cfg: &PathConfig,
) -> Result<Vec<RhoPoint>> {
    check_unit(theta)?;
    check_n(n)?;
    cfg.validate()?;
    if !(coupling >= 0.0) || !coupling.is_finite() {
        return Err(domain(format!("coupling must be finite and >= 0, got {coupling}")));
    }
    let drift = DriftField::Constant(theta);
    rhos.iter()
        .map(|&rho| {
            let outer = v.truncate(rho, TruncationMode::Outer)?;
            Ok(RhoPoint { rho, estimate: real_amplitude(&drift, &outer, coupling, n, cfg) })
        })
        .collect()
}

/// `|b|` at one coupling in a threshold check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaPoint {
    pub lambda: f64,
    pub b: ComplexEstimate,
    pub modulus: f64,
    pub modulus_stderr: f64,
    /// `modulus - 3 σ > 1/2`
    pub above_half: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub coupling: f64,
    pub rho: f64,
    pub radius: f64,
    /// `E[exp(-(c/2)∫|V^{(ρ)}|)]`
    pub premise: Estimate,
    /// `premise - 3σ > 0.99`
    pub premise_holds: bool,
    pub points: Vec<LambdaPoint>,
    pub conclusion_holds: bool,
    /// `!premise_holds || conclusion_holds`
    pub implication_holds: bool,
}

/// Premise threshold on the real amplitude.
pub const PREMISE_LEVEL: f64 = 0.99;
/// Conclusion threshold on `|b|`.
pub const CONCLUSION_LEVEL: f64 = 0.5;

/// Check empirically that a real amplitude above 0.99 at coupling `c` forces
/// `|b_R^{(ρ)}| > 1/2` for every `λ` in the grid.
#[allow(clippy::too_many_arguments)]
pub fn threshold_implication(
    v: &Potential,
    theta: Vec3,
    coupling: f64,
    lambdas: &[f64],
    rho: f64,
    radius: f64,
    n: u64,
    cfg: &PathConfig,
) -> Result<ThresholdReport> {
    if !(coupling > 0.0) {
        return Err(domain(format!("coupling c must be positive, got {coupling}")));
    }
    if !(radius > rho) {
        return Err(domain(format!("need R > rho, got R = {radius}, rho = {rho}")));
    }
    if let Some(l) = lambdas.iter().find(|l| !(l.abs() <= coupling)) {
        return Err(domain(format!("lambda {l} lies outside [-{coupling}, {coupling}]")));
    }
    let outer = v.truncate(rho, TruncationMode::Outer)?;
    let premise = rho_sweep(v, theta, &[rho], coupling, n, cfg)?[0].estimate;
    let premise_holds = premise.mean - 3.0 * premise.stderr > PREMISE_LEVEL;
    let bs = estimate_b_grid(theta, &outer, lambdas, radius, n, cfg)?;
    let points: Vec<LambdaPoint> = lambdas
        .iter()
        .zip(bs)
        .map(|(&lambda, b)| {
            let modulus = b.modulus();
            let modulus_stderr = b.modulus_stderr();
            LambdaPoint {
                lambda,
                b,
                modulus,
                modulus_stderr,
                above_half: modulus - 3.0 * modulus_stderr > CONCLUSION_LEVEL,
            }
        })
        .collect();
    let conclusion_holds = points.iter().all(|p| p.above_half);
    Ok(ThresholdReport {
        coupling,
        rho,
        radius,
        premise,
        premise_holds,
        points,
        conclusion_holds,
        implication_holds: !premise_holds || conclusion_holds,
    })
}

/// Empirical distribution of the truncated path integral `∫_0^{t_max}|V|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummabilityReport {
    pub n: u64,
    /// Mean and stderr of the integral itself.
    pub integral: Estimate,
    /// `a`-type weight `exp(-½∫|V|)`.
    pub weight: Estimate,
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// `(p, quantile)` of the integral.
    pub quantiles: Vec<(f64, f64)>,
    /// `(p, quantile)` of the per-path tail bounds.
    pub tail_bound_quantiles: Vec<(f64, f64)>,
    /// Paths whose integral reached half of `bound · t_end`, i.e. that spent
    /// most of their life where `|V|` is near its bound.
    pub saturated_fraction: f64,
    pub escaped_fraction: f64,
}

const QUANTILE_LEVELS: [f64; 5] = [0.1, 0.5, 0.9, 0.99, 1.0];

fn quantile(sorted: &[f64], p: f64) -> f64 {
    let idx = ((p * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1;
    sorted[idx]
}

/// Histogram of `∫|V|` along `n` paths of `drift`, with tail-bound quantiles.
pub fn summability_histogram(
    v: &Potential,
    drift: &DriftField,
    n: u64,
    bins: usize,
    cfg: &PathConfig,
) -> Result<SummabilityReport> {
    check_n(n)?;
    cfg.validate()?;
    if let DriftField::Constant(theta) = drift {
        check_unit(*theta)?;
    }
    if bins == 0 {
        return Err(config("histogram needs at least one bin"));
    }
    let samples: Vec<FunctionalSample> =
        (0..n).into_par_iter().map(|i| functional_unchecked(drift, v, cfg, i)).collect();
    let mut integral = Moments::default();
    let mut weight = Moments::default();
    let mut tails = Moments::default();
    for s in &samples {
        integral.push(s.integral_abs_v);
        weight.push((-0.5 * s.integral_abs_v).exp());
        tails.push(s.tail_bound);
    }
    let mut vals: Vec<f64> = samples.iter().map(|s| s.integral_abs_v).collect();
    vals.sort_by(f64::total_cmp);
    let mut tail_vals: Vec<f64> = samples.iter().map(|s| s.tail_bound).collect();
    tail_vals.sort_by(f64::total_cmp);
    let hi = *vals.last().unwrap_or(&0.0);
    let (bin_edges, counts) = if hi > 0.0 {
        let w = hi / bins as f64;
        let edges: Vec<f64> = (0..=bins).map(|k| k as f64 * w).collect();
        let mut counts = vec![0u64; bins];
        for &x in &vals {
            counts[((x / w) as usize).min(bins - 1)] += 1;
        }
        (edges, counts)
    } else {
        (vec![0.0, 0.0], vec![n])
    };
    let bound = v.bound();
    let saturated =
        samples.iter().filter(|s| bound > 0.0 && s.t_end > 0.0 && s.integral_abs_v >= 0.5 * bound * s.t_end).count();
    Ok(SummabilityReport {
        n,
        integral: Estimate::from_moments(&integral, tails.mean),
        weight: Estimate::from_moments(&weight, tails.mean),
        bin_edges,
        counts,
        quantiles: QUANTILE_LEVELS.iter().map(|&p| (p, quantile(&vals, p))).collect(),
        tail_bound_quantiles: QUANTILE_LEVELS.iter().map(|&p| (p, quantile(&tail_vals, p))).collect(),
        saturated_fraction: saturated as f64 / n as f64,
        escaped_fraction: samples.iter().filter(|s| s.escaped).count() as f64 / n as f64,
    })
}

/// Sample-level `a` weights on shared paths, for samplewise comparisons.
pub fn a_weights(theta: Vec3, v: &Potential, n: u64, cfg: &PathConfig) -> Result<Vec<f64>> {
    check_unit(theta)?;
    cfg.validate()?;
    let drift = DriftField::Constant(theta);
    Ok((0..n).into_par_iter().map(|i| (-0.5 * functional_unchecked(&drift, v, cfg, i).integral_abs_v).exp()).collect())
}

/// Sample-level `b` weights, for the modulus and conjugation checks.
pub fn b_weights(
    theta: Vec3,
    v: &Potential,
    lambda: f64,
    radius: f64,
    n: u64,
    cfg: &PathConfig,
) -> Result<Vec<Complex64>> {
    check_unit(theta)?;
    cfg.validate()?;
    let vr = v.truncate(radius, TruncationMode::Inner)?;
    let drift = DriftField::Constant(theta);
    Ok((0..n)
        .into_par_iter()
        .map(|i| phase_weight(lambda * functional_unchecked(&drift, &vr, cfg, i).integral_v, 1.0))
        .collect())
}
