//! Special-function primitives shared by every other module: the radial
//! Bessel-ratio drift, the smooth radial cutoff, and the free Green's kernel.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, FkError, Result};
use crate::vec3::Vec3;

/// Below this radius the ν = 1/2 drift uses its Taylor series; `coth r - 1/r`
/// loses most of its digits to cancellation there.
pub const SERIES_SWITCH: f64 = 1e-2;

const CF_EPS: f64 = 1e-16;
const CF_TINY: f64 = 1e-300;
const CF_MAX_ITER: usize = 100_000;

/// Radial magnitude `I'_ν(r)/I_ν(r) - ν/r` of the Bessel drift.
///
/// Uses the identity `I'_ν/I_ν - ν/r = I_{ν+1}/I_ν`. For ν = 1/2 this is
/// `coth r - 1/r`, evaluated in closed form above [`SERIES_SWITCH`] and by
/// `r/3 - r³/45 + 2r⁵/945` below it. Other orders go through a continued
/// fraction.
pub fn bessel_drift_magnitude(r: f64, nu: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(domain(format!("drift radius must be >= 0, got {r}")));
    }
    if !(nu > 0.0) {
        return Err(domain(format!("Bessel order must be > 0, got {nu}")));
    }
    if nu == 0.5 {
        Ok(half_order_drift(r))
    } else {
        bessel_ratio_cf(r, nu)
    }
}

/// `coth r - 1/r` for r >= 0, without the cancellation near 0.
#[inline]
pub fn half_order_drift(r: f64) -> f64 {
    if r < SERIES_SWITCH {
        let r2 = r * r;
        r * (1.0 / 3.0 - r2 * (1.0 / 45.0 - r2 * (2.0 / 945.0)))
    } else if r < 20.0 {
        // coth r = 1 + 2/(e^{2r} - 1)
        1.0 + (2.0 / (2.0 * r).exp_m1() - 1.0 / r)
    } else {
        // e^{-2r} is below half an ulp of 1
        1.0 - 1.0 / r
    }
}

/// `I_{ν+1}(x) / I_ν(x)` by modified Lentz evaluation of
/// `1 / (2(ν+1)/x + 1 / (2(ν+2)/x + ...))`.
pub fn bessel_ratio_cf(x: f64, nu: f64) -> Result<f64> {
    if !(x >= 0.0) || !(nu > 0.0) {
        return Err(domain(format!("bessel ratio needs x >= 0, nu > 0 (x={x}, nu={nu})")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let mut f = CF_TINY;
    let mut c = f;
    let mut d = 0.0;
    for k in 1..=CF_MAX_ITER {
        let b = 2.0 * (nu + k as f64) / x;
        d = b + d;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        d = 1.0 / d;
        c = b + 1.0 / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < CF_EPS {
            return Ok(f);
        }
    }
    Err(domain(format!("bessel ratio continued fraction did not converge (x={x}, nu={nu})")))
}

/// The ν = 1/2 drift field `p(x) = (coth|x| - 1/|x|) x/|x|`; zero at the origin.
#[inline]
pub fn bessel_drift(x: Vec3) -> Vec3 {
    let r = x.norm();
    if r == 0.0 {
        return Vec3::ZERO;
    }
    x * (half_order_drift(r) / r)
}

/// Radius of a smooth radial cutoff. The transition band always has half-width 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffSpec {
    radius: f64,
}

impl CutoffSpec {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 1.0) || !radius.is_finite() {
            return Err(domain(format!("cutoff radius must be finite and > 1, got {radius}")));
        }
        Ok(Self { radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

fn exp_bump(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Smooth step: 0 for t <= 0, 1 for t >= 1, C^∞ in between, with
/// `transition(1 - t) = 1 - transition(t)`.
#[inline]
pub fn transition(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = exp_bump(t);
        a / (a + exp_bump(1.0 - t))
    }
}

/// `ω_R(r)`: 1 on `[0, R-1]`, 0 on `[R+1, ∞)`, nonincreasing, and 1/2 at `r = R`.
#[inline]
pub fn smooth_cutoff(r: f64, spec: CutoffSpec) -> f64 {
    cutoff_at(r, spec.radius)
}

#[inline]
pub(crate) fn cutoff_at(r: f64, radius: f64) -> f64 {
    transition((radius + 1.0 - r) / 2.0)
}

/// Free Green's function `e^{ik|x-y|} / (4π|x-y|)` of `-Δ - k²` for Im k > 0.
pub fn free_green(x: Vec3, y: Vec3, k: Complex64) -> Result<Complex64> {
    if !(k.im > 0.0) {
        return Err(domain(format!("free kernel needs Im k > 0, got k = {k}")));
    }
    let r = (x - y).norm();
    if r == 0.0 {
        return Err(FkError::Singular);
    }
    Ok((Complex64::i() * k * r).exp() / (4.0 * PI * r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // mpmath, 30 digits
    const COTH1_M1: f64 = 0.313_035_285_499_331_303_636;
    const COTH2_MHALF: f64 = 0.537_314_720_727_548_095_878;
    const AT_SWITCH: f64 = 0.003_333_311_111_322_749_206_37;

    #[test]
    fn drift_magnitude_anchors() {
        assert_eq!(bessel_drift_magnitude(0.0, 0.5).unwrap(), 0.0);
        assert_relative_eq!(bessel_drift_magnitude(1.0, 0.5).unwrap(), COTH1_M1, max_relative = 1e-15);
        assert_relative_eq!(bessel_drift_magnitude(2.0, 0.5).unwrap(), COTH2_MHALF, max_relative = 1e-15);
        // the closed form at the switch keeps ~12 digits
        assert_relative_eq!(bessel_drift_magnitude(0.01, 0.5).unwrap(), AT_SWITCH, max_relative = 1e-11);
        assert_relative_eq!(bessel_drift_magnitude(50.0, 0.5).unwrap(), 0.98, max_relative = 1e-15);
    }

    #[test]
    fn drift_magnitude_rejects_bad_input() {
        assert!(matches!(bessel_drift_magnitude(-1e-9, 0.5), Err(FkError::Domain(_))));
        assert!(matches!(bessel_drift_magnitude(1.0, 0.0), Err(FkError::Domain(_))));
        assert!(bessel_drift_magnitude(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn series_matches_closed_form_near_switch() {
        for i in 0..=2000 {
            let r = 0.005 + 0.01 * i as f64 / 2000.0;
            let series = {
                let r2 = r * r;
                r * (1.0 / 3.0 - r2 * (1.0 / 45.0 - r2 * (2.0 / 945.0)))
            };
            let closed = 1.0 / r.tanh() - 1.0 / r;
            assert!((series - closed).abs() < 1e-12, "r={r}");
        }
    }

    #[test]
    fn drift_magnitude_is_increasing_and_below_one() {
        let mut prev = 0.0;
        for i in 1..=200_000 {
            let r = i as f64 * 1e-3;
            let p = half_order_drift(r);
            assert!(p > prev && p < 1.0, "r={r}");
            prev = p;
        }
    }

    #[test]
    fn continued_fraction_agrees_with_closed_form() {
        for &r in &[1e-3, 0.1, 0.5, 1.0, 2.0, 7.5, 30.0, 120.0] {
            let cf = bessel_ratio_cf(r, 0.5).unwrap();
            assert_relative_eq!(cf, half_order_drift(r), max_relative = 1e-12);
        }
        // I_2/I_1 small-argument behaviour x/(2(ν+1))
        assert_relative_eq!(bessel_ratio_cf(1e-6, 1.0).unwrap(), 1e-6 / 4.0, max_relative = 1e-9);
        assert_eq!(bessel_drift_magnitude(0.0, 1.5).unwrap(), 0.0);
    }

    #[test]
    fn drift_field_symmetry() {
        assert_eq!(bessel_drift(Vec3::ZERO), Vec3::ZERO);
        let p = bessel_drift(Vec3::E1);
        assert_relative_eq!(p.x, COTH1_M1, max_relative = 1e-15);
        assert_eq!((p.y, p.z), (0.0, 0.0));
        let a = bessel_drift(Vec3::new(-2.0, 0.0, 0.0));
        assert_eq!(a, -bessel_drift(Vec3::new(2.0, 0.0, 0.0)));
        assert_relative_eq!(a.x, -COTH2_MHALF, max_relative = 1e-15);
    }

    #[test]
    fn cutoff_plateaus_and_midpoint() {
        let spec = CutoffSpec::new(5.0).unwrap();
        assert_eq!(smooth_cutoff(3.0, spec), 1.0);
        assert_eq!(smooth_cutoff(4.0, spec), 1.0);
        assert_eq!(smooth_cutoff(6.0, spec), 0.0);
        assert_eq!(smooth_cutoff(7.0, spec), 0.0);
        assert_eq!(smooth_cutoff(5.0, spec), 0.5);
        assert!(CutoffSpec::new(1.0).is_err());
    }

    #[test]
    fn cutoff_is_monotone_and_partitions_unity() {
        let spec = CutoffSpec::new(3.5).unwrap();
        let mut prev = 1.0;
        for i in 0..=10_000 {
            let r = i as f64 * 1e-3;
            let w = smooth_cutoff(r, spec);
            assert!((0.0..=1.0).contains(&w));
            assert!(w <= prev);
            assert_eq!(w + (1.0 - w), 1.0);
            prev = w;
        }
    }

    #[test]
    fn free_kernel() {
        let g = free_green(Vec3::ZERO, Vec3::E2, Complex64::i()).unwrap();
        assert_relative_eq!(g.re, 0.029_274_915_762_159_580_345, max_relative = 1e-14);
        assert_eq!(g.im, 0.0);
        assert_eq!(free_green(Vec3::E1, Vec3::E1, Complex64::i()), Err(FkError::Singular));
        assert!(matches!(free_green(Vec3::ZERO, Vec3::E1, Complex64::new(1.0, 0.0)), Err(FkError::Domain(_))));
        let (r, rp) = (3.0, 1.25);
        let ratio = free_green(Vec3::ZERO, Vec3::E1 * r, Complex64::i()).unwrap()
            / free_green(Vec3::ZERO, Vec3::E3 * rp, Complex64::i()).unwrap();
        assert_relative_eq!(ratio.re, (rp / r) * (-(r - rp)).exp(), max_relative = 1e-14);
    }
}
