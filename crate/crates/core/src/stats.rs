//! Monte Carlo accumulators and estimates.
//!
//! Accumulation is blockwise: sample indices are cut into fixed blocks,
//! each block is folded sequentially, and block results are merged in index
//! order. The reduction tree therefore never depends on the worker count.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Samples per reduction block.
pub const BLOCK: u64 = 512;

/// Fold `0..n` in parallel with a worker-independent reduction order.
pub fn par_fold<A, I, F, M>(n: u64, init: I, fold: F, merge: M) -> A
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    F: Fn(&mut A, u64) + Sync + Send,
    M: Fn(&mut A, A),
{
    let blocks = n.div_ceil(BLOCK);
    let parts: Vec<A> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut acc = init();
            for i in b * BLOCK..((b + 1) * BLOCK).min(n) {
                fold(&mut acc, i);
            }
            acc
        })
        .collect();
    let mut total = init();
    for p in parts {
        merge(&mut total, p);
    }
    total
}

/// Running count, mean and centered second moment (Welford / Chan).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub n: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    #[inline]
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: Moments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = other;
            return;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let w = other.n as f64 / n as f64;
        self.mean += delta * w;
        self.m2 += other.m2 + delta * delta * self.n as f64 * w;
        self.n = n;
    }

    /// Unbiased sample variance; 0 for fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64).max(0.0)
        }
    }

    pub fn stderr(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }
}

/// Moments of a complex sample, including the real/imaginary co-moment.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ComplexMoments {
    pub re: Moments,
    pub im: Moments,
    pub c2: f64,
}

impl ComplexMoments {
    #[inline]
    pub fn push(&mut self, z: Complex64) {
        let d_im = z.im - self.im.mean;
        self.re.push(z.re);
        self.im.push(z.im);
        // co-moment update: old imag deviation times new real deviation
        self.c2 += d_im * (z.re - self.re.mean);
    }

    pub fn merge(&mut self, other: ComplexMoments) {
        if other.re.n == 0 {
            return;
        }
        if self.re.n == 0 {
            *self = other;
            return;
        }
        let (na, nb) = (self.re.n as f64, other.re.n as f64);
        let d_re = other.re.mean - self.re.mean;
        let d_im = other.im.mean - self.im.mean;
        self.c2 += other.c2 + d_re * d_im * na * nb / (na + nb);
        self.re.merge(other.re);
        self.im.merge(other.im);
    }

    pub fn covariance(&self) -> f64 {
        if self.re.n < 2 {
            0.0
        } else {
            self.c2 / (self.re.n - 1) as f64
        }
    }
}

/// A real Monte Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
    /// Mean per-sample bound on the functional mass beyond the time horizon.
    pub mean_tail_bound: f64,
}

impl Estimate {
    pub fn from_moments(m: &Moments, mean_tail_bound: f64) -> Self {
        Self { mean: m.mean, stderr: m.stderr(), n: m.n, mean_tail_bound }
    }

    /// Whether `self` and `other` agree within `k` combined standard errors.
    pub fn agrees_with(&self, other: &Estimate, k: f64) -> bool {
        (self.mean - other.mean).abs() <= k * self.stderr.hypot(other.stderr)
    }
}

/// A complex Monte Carlo estimate with componentwise standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexEstimate {
    pub mean: Complex64,
    pub stderr_re: f64,
    pub stderr_im: f64,
    /// Covariance of the real and imaginary sample means.
    pub cov_re_im: f64,
    pub n: u64,
    /// Mean over paths of the heuristic bound on the truncated tail.
    pub mean_tail_bound: f64,
}

impl ComplexEstimate {
    pub fn from_moments(m: &ComplexMoments, mean_tail_bound: f64) -> Self {
        let n = m.re.n;
        Self {
            mean: Complex64::new(m.re.mean, m.im.mean),
            stderr_re: m.re.stderr(),
            stderr_im: m.im.stderr(),
            cov_re_im: if n == 0 { 0.0 } else { m.covariance() / n as f64 },
            n,
            mean_tail_bound,
        }
    }

    pub fn modulus(&self) -> f64 {
        self.mean.norm()
    }

    /// Delta-method standard error of `|mean|`.
    pub fn modulus_stderr(&self) -> f64 {
        let m = self.modulus();
        let (vr, vi) = (self.stderr_re * self.stderr_re, self.stderr_im * self.stderr_im);
        if m == 0.0 {
            return vr.max(vi).sqrt();
        }
        let (a, b) = (self.mean.re / m, self.mean.im / m);
        (a * a * vr + b * b * vi + 2.0 * a * b * self.cov_re_im).max(0.0).sqrt()
    }
}
