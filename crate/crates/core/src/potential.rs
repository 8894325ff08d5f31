//! Bounded scalar potentials with tail metadata, the inner/outer smooth
//! truncations, and a small library of standard test potentials.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{config, domain, FkError, Result};
use crate::math::{cutoff_at, transition};
use crate::vec3::Vec3;

/// Envelope for `|V(x)|` as a function of `|x|`, valid beyond the potential's
/// decay radius. Knows its own integral to infinity so the path engine can
/// bound the functional mass it neglects after the time horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailProfile {
    /// `V` vanishes identically beyond the decay radius.
    Zero,
    Constant(f64),
    /// `A exp(-(s - offset)² / w²)` for `s >= offset`.
    Gaussian {
        amplitude: f64,
        offset: f64,
        width: f64,
    },
    /// `A (1 + s²)^(-α/2)`.
    Power {
        amplitude: f64,
        exponent: f64,
    },
}

impl TailProfile {
    pub fn at(&self, s: f64) -> f64 {
        match *self {
            TailProfile::Zero => 0.0,
            TailProfile::Constant(c) => c,
            TailProfile::Gaussian { amplitude, offset, width } => {
                let u = (s - offset).max(0.0) / width;
                amplitude * (-u * u).exp()
            }
            TailProfile::Power { amplitude, exponent } => amplitude * (1.0 + s * s).powf(-0.5 * exponent),
        }
    }

    /// Upper bound on `∫_s^∞ profile(u) du`; infinite for non-decaying profiles.
    pub fn integral_from(&self, s: f64) -> f64 {
        match *self {
            TailProfile::Zero => 0.0,
            TailProfile::Constant(c) => {
                if c == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            TailProfile::Gaussian { amplitude, offset, width } => {
                let u = (s - offset).max(0.0) / width;
                amplitude * width * 0.5 * PI.sqrt() * libm::erfc(u)
            }
            TailProfile::Power { amplitude, exponent } => {
                if amplitude == 0.0 {
                    0.0
                } else if exponent == 4.0 {
                    // exact antiderivative of (1+u²)^-2
                    amplitude * (0.25 * PI - 0.5 * s / (1.0 + s * s) - 0.5 * s.atan())
                } else if exponent > 1.0 && s > 0.0 {
                    // (1+u²)^(-α/2) <= u^-α
                    amplitude * s.powf(1.0 - exponent) / (exponent - 1.0)
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    fn scaled(self, factor: f64) -> TailProfile {
        let f = factor.abs();
        match self {
            TailProfile::Zero => TailProfile::Zero,
            _ if f == 0.0 => TailProfile::Zero,
            TailProfile::Constant(c) => TailProfile::Constant(c * f),
            TailProfile::Gaussian { amplitude, offset, width } => {
                TailProfile::Gaussian { amplitude: amplitude * f, offset, width }
            }
            TailProfile::Power { amplitude, exponent } => TailProfile::Power { amplitude: amplitude * f, exponent },
        }
    }
}

/// Cell width and count of the return-excursion sum in `tail_mass`. Returns
/// deeper than the 20-unit window carry weight below `e^-40` and are dropped,
/// so a compactly supported potential gets an exact zero once the path is
/// that far past its support.
const RETURN_STEP: f64 = 0.25;
const RETURN_STEPS: usize = 80;
pub const RETURN_WINDOW: f64 = RETURN_STEP * RETURN_STEPS as f64;

type Field = Arc<dyn Fn(Vec3) -> f64 + Send + Sync>;

/// An evaluable real potential with a sup-norm bound and tail envelope.
///
/// Cloning is cheap; the field itself is shared.
#[derive(Clone)]
pub struct Potential {
    field: Field,
    bound: f64,
    decay_radius: f64,
    tail: TailProfile,
    label: String,
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Potential")
            .field("label", &self.label)
            .field("bound", &self.bound)
            .field("decay_radius", &self.decay_radius)
            .field("tail", &self.tail)
            .finish()
    }
}

/// Which side of the cutoff sphere a truncation keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruncationMode {
    /// `V(x) ω_R(|x|)`: keep the part inside radius `R`.
    Inner,
    /// `V(x) (1 - ω_ρ(|x|))`: keep the part outside radius `ρ`.
    Outer,
}

impl Potential {
    /// A potential from an arbitrary closure. The caller vouches for `bound`;
    /// the tail envelope is the constant `bound`.
    pub fn from_fn<F>(label: impl Into<String>, bound: f64, f: F) -> Self
    where
        F: Fn(Vec3) -> f64 + Send + Sync + 'static,
    {
        Self { field: Arc::new(f), bound, decay_radius: 1.0, tail: TailProfile::Constant(bound), label: label.into() }
    }

    pub fn zero() -> Self {
        Self { field: Arc::new(|_| 0.0), bound: 0.0, decay_radius: 1.0, tail: TailProfile::Zero, label: "zero".into() }
    }

    #[inline]
    pub fn eval(&self, x: Vec3) -> f64 {
        (self.field)(x)
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn decay_radius(&self) -> f64 {
        self.decay_radius
    }

    pub fn tail(&self) -> TailProfile {
        self.tail
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Envelope of `|V|` at radius `s`: the tail profile past the decay
    /// radius, the sup bound inside it.
    pub fn envelope(&self, s: f64) -> f64 {
        if s > self.decay_radius {
            self.tail.at(s)
        } else {
            self.bound
        }
    }

    /// Bound on `∫ |V|` along the outward unit-speed ray starting at radius `s`.
    pub fn ray_tail_mass(&self, s: f64) -> f64 {
        if s >= self.decay_radius {
            self.tail.integral_from(s)
        } else {
            self.bound * (self.decay_radius - s) + self.tail.integral_from(self.decay_radius)
        }
    }

    /// Bound on the expected `∫ |V|` still to come for a path whose radius
    /// stays above `a + t + W_t`. That comparison process has Green's function
    /// 1 ahead of `a` and `exp(-2(a - u))` behind it, so the bound is the ray
    /// mass plus what returning excursions can collect (within the window).
    pub fn tail_mass(&self, a: f64) -> f64 {
        if a <= 0.0 {
            return self.bound * (0.5 - a) + self.ray_tail_mass(0.0);
        }
        let ahead = self.ray_tail_mass(a);
        if ahead.is_infinite() {
            return ahead;
        }
        // upper Riemann sum of the nonincreasing envelope against the weight
        let mut behind = 0.0;
        let mut hi = a;
        for _ in 0..RETURN_STEPS {
            let lo = (hi - RETURN_STEP).max(0.0);
            behind += self.envelope(lo) * 0.5 * ((-2.0 * (a - hi)).exp() - (-2.0 * (a - lo)).exp());
            hi = lo;
            if hi == 0.0 {
                // negative comparison positions, where the envelope is at most the bound
                behind += self.bound * 0.5 * (-2.0 * a).exp();
                break;
            }
        }
        ahead + behind
    }

    /// `c · V`, with bound and tail scaled by `|c|`.
    pub fn scaled(&self, factor: f64) -> Potential {
        let inner = self.field.clone();
        Potential {
            field: Arc::new(move |x| factor * inner(x)),
            bound: self.bound * factor.abs(),
            decay_radius: self.decay_radius,
            tail: self.tail.scaled(factor),
            label: format!("{factor}*({})", self.label),
        }
    }

    /// Smooth inner (`V ω_R`) or outer (`V (1 - ω_ρ)`) truncation at `radius`.
    pub fn truncate(&self, radius: f64, mode: TruncationMode) -> Result<Potential> {
        if !(radius > 1.0) || !radius.is_finite() {
            return Err(domain(format!("truncation radius must be finite and > 1, got {radius}")));
        }
        let inner = self.field.clone();
        let out = match mode {
            TruncationMode::Inner => Potential {
                field: Arc::new(move |x| inner(x) * cutoff_at(x.norm(), radius)),
                bound: self.bound,
                decay_radius: radius + 1.0,
                tail: TailProfile::Zero,
                label: format!("inner({}, {radius})", self.label),
            },
            TruncationMode::Outer => Potential {
                field: Arc::new(move |x| inner(x) * (1.0 - cutoff_at(x.norm(), radius))),
                bound: self.bound,
                decay_radius: self.decay_radius,
                tail: self.tail,
                label: format!("outer({}, {radius})", self.label),
            },
        };
        Ok(out)
    }
}

/// Free-function form of [`Potential::truncate`].
pub fn truncate(v: &Potential, radius: f64, mode: TruncationMode) -> Result<Potential> {
    v.truncate(radius, mode)
}

/// The built-in potential families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    /// `A exp(-|x-c|²/w²)`. Params `[A, w]`, `[A, c1, w]` (center on the
    /// first axis) or `[A, c1, c2, c3, w]`.
    GaussianBump,
    /// `A exp(1 - 1/(1 - |x-c|²/w²))` inside `|x-c| < w`, zero outside.
    /// Same parameter layouts as `GaussianBump`.
    BallBump,
    /// `A` on `{x1 > 1/2}`, 0 on `{x1 < -1/2}`, smooth across the band. Params `[A]`.
    HalfSpace,
    /// `A (1 + |x|²)^(-α/2)`. Params `[A, α]`.
    PowerDecay,
    /// Params `[c]`.
    Constant,
}

impl PotentialKind {
    pub const ALL: [PotentialKind; 5] = [
        PotentialKind::GaussianBump,
        PotentialKind::BallBump,
        PotentialKind::HalfSpace,
        PotentialKind::PowerDecay,
        PotentialKind::Constant,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PotentialKind::GaussianBump => "gaussian_bump",
            PotentialKind::BallBump => "ball_bump",
            PotentialKind::HalfSpace => "half_space",
            PotentialKind::PowerDecay => "power_decay",
            PotentialKind::Constant => "constant",
        }
    }
}

impl fmt::Display for PotentialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PotentialKind {
    type Err = FkError;

    fn from_str(s: &str) -> Result<Self> {
        PotentialKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            let names: Vec<_> = PotentialKind::ALL.iter().map(|k| k.name()).collect();
            config(format!("unknown potential kind '{s}', expected one of {}", names.join(", ")))
        })
    }
}

fn center_and_width(kind: PotentialKind, params: &[f64]) -> Result<(f64, Vec3, f64)> {
    let (a, c, w) = match *params {
        [a, w] => (a, Vec3::ZERO, w),
        [a, c1, w] => (a, Vec3::new(c1, 0.0, 0.0), w),
        [a, c1, c2, c3, w] => (a, Vec3::new(c1, c2, c3), w),
        _ => {
            return Err(config(format!(
                "{kind} takes [A, w], [A, c, w] or [A, c1, c2, c3, w]; got {} params",
                params.len()
            )))
        }
    };
    if !(w > 0.0) {
        return Err(config(format!("{kind} width must be positive, got {w}")));
    }
    Ok((a, c, w))
}

fn check_finite(kind: PotentialKind, params: &[f64]) -> Result<()> {
    match params.iter().find(|p| !p.is_finite()) {
        Some(p) => Err(config(format!("{kind} parameter is not finite: {p}"))),
        None => Ok(()),
    }
}

/// Build one of the standard potentials from its kind and parameter list.
pub fn make_standard_potential(kind: PotentialKind, params: &[f64]) -> Result<Potential> {
    check_finite(kind, params)?;
    let label = format!("{kind}{params:?}");
    let pot = match kind {
        PotentialKind::GaussianBump => {
            let (a, c, w) = center_and_width(kind, params)?;
            let inv_w2 = 1.0 / (w * w);
            Potential {
                field: Arc::new(move |x| a * (-(x - c).norm_sq() * inv_w2).exp()),
                bound: a.abs(),
                decay_radius: c.norm() + w,
                tail: TailProfile::Gaussian { amplitude: a.abs(), offset: c.norm(), width: w },
                label,
            }
        }
        PotentialKind::BallBump => {
            let (a, c, w) = center_and_width(kind, params)?;
            let inv_w2 = 1.0 / (w * w);
            Potential {
                field: Arc::new(move |x| {
                    let s2 = (x - c).norm_sq() * inv_w2;
                    if s2 < 1.0 {
                        a * (1.0 - 1.0 / (1.0 - s2)).exp()
                    } else {
                        0.0
                    }
                }),
                bound: a.abs(),
                decay_radius: c.norm() + w,
                tail: TailProfile::Zero,
                label,
            }
        }
        PotentialKind::HalfSpace => {
            let [a] = *params else {
                return Err(config(format!("half_space takes [A]; got {} params", params.len())));
            };
            Potential {
                field: Arc::new(move |x| a * transition(x.x + 0.5)),
                bound: a.abs(),
                decay_radius: 1.0,
                tail: if a == 0.0 { TailProfile::Zero } else { TailProfile::Constant(a.abs()) },
                label,
            }
        }
        PotentialKind::PowerDecay => {
            let [a, alpha] = *params else {
                return Err(config(format!("power_decay takes [A, alpha]; got {} params", params.len())));
            };
            if !(alpha > 0.0) {
                return Err(config(format!("power_decay exponent must be positive, got {alpha}")));
            }
            let half = -0.5 * alpha;
            let field: Field = if half.fract() == 0.0 && half >= -64.0 {
                let n = half as i32;
                Arc::new(move |x| a * (1.0 + x.norm_sq()).powi(n))
            } else {
                Arc::new(move |x| a * (1.0 + x.norm_sq()).powf(half))
            };
            Potential {
                field,
                bound: a.abs(),
                decay_radius: 1.0,
                tail: TailProfile::Power { amplitude: a.abs(), exponent: alpha },
                label,
            }
        }
        PotentialKind::Constant => {
            let [c] = *params else {
                return Err(config(format!("constant takes [c]; got {} params", params.len())));
            };
            Potential {
                field: Arc::new(move |_| c),
                bound: c.abs(),
                decay_radius: 1.0,
                tail: if c == 0.0 { TailProfile::Zero } else { TailProfile::Constant(c.abs()) },
                label,
            }
        }
    };
    Ok(pot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{smooth_cutoff, CutoffSpec};
    use rand::{Rng, SeedableRng};
    use rand_xoshiro::Xoshiro256PlusPlus as ChaCha8Rng;

    fn random_point(rng: &mut ChaCha8Rng, scale: f64) -> Vec3 {
        Vec3::new(rng.random_range(-scale..scale), rng.random_range(-scale..scale), rng.random_range(-scale..scale))
    }

    fn library() -> Vec<Potential> {
        vec![
            make_standard_potential(PotentialKind::GaussianBump, &[2.0, 0.0, 1.0]).unwrap(),
            make_standard_potential(PotentialKind::GaussianBump, &[-1.5, 1.0, -2.0, 0.5, 0.7]).unwrap(),
            make_standard_potential(PotentialKind::BallBump, &[1.0, 0.0, 1.0]).unwrap(),
            make_standard_potential(PotentialKind::HalfSpace, &[-1.0]).unwrap(),
            make_standard_potential(PotentialKind::PowerDecay, &[1.0, 4.0]).unwrap(),
            make_standard_potential(PotentialKind::PowerDecay, &[-0.5, 2.5]).unwrap(),
            make_standard_potential(PotentialKind::Constant, &[0.3]).unwrap(),
        ]
    }

    #[test]
    fn standard_anchor_values() {
        let g = make_standard_potential(PotentialKind::GaussianBump, &[1.0, 0.0, 1.0]).unwrap();
        assert_eq!(g.eval(Vec3::ZERO), 1.0);
        let h = make_standard_potential(PotentialKind::HalfSpace, &[-1.0]).unwrap();
        assert_eq!(h.eval(Vec3::new(5.0, 0.0, 0.0)), -1.0);
        assert_eq!(h.eval(Vec3::new(-5.0, 0.0, 0.0)), 0.0);
        assert_eq!(h.eval(Vec3::ZERO), -0.5);
        let p = make_standard_potential(PotentialKind::PowerDecay, &[1.0, 4.0]).unwrap();
        assert_eq!(p.eval(Vec3::E2), 0.25);
        let b = make_standard_potential(PotentialKind::BallBump, &[1.0, 0.0, 1.0]).unwrap();
        assert_eq!(b.eval(Vec3::ZERO), 1.0);
        assert_eq!(b.eval(Vec3::E3), 0.0);
        let off = make_standard_potential(PotentialKind::GaussianBump, &[3.0, 2.0, 1.0]).unwrap();
        assert_eq!(off.eval(Vec3::new(2.0, 0.0, 0.0)), 3.0);
    }

    #[test]
    fn bad_params_are_config_errors() {
        use PotentialKind::*;
        let bad: &[(PotentialKind, &[f64])] = &[
            (GaussianBump, &[1.0, 0.0]),
            (GaussianBump, &[1.0, 0.0, -1.0]),
            (BallBump, &[1.0]),
            (PowerDecay, &[1.0, 0.0]),
            (PowerDecay, &[1.0]),
            (HalfSpace, &[]),
            (Constant, &[f64::NAN]),
        ];
        for (kind, params) in bad {
            assert!(matches!(make_standard_potential(*kind, params), Err(FkError::Config(_))), "{kind} {params:?}");
        }
        assert!(matches!("entropy".parse::<PotentialKind>(), Err(FkError::Config(_))));
        assert_eq!("power_decay".parse::<PotentialKind>().unwrap(), PotentialKind::PowerDecay);
    }

    #[test]
    fn truncation_partition_and_plateaus() {
        let v = make_standard_potential(PotentialKind::PowerDecay, &[1.0, 4.0]).unwrap();
        let r = 5.0;
        let inner = v.truncate(r, TruncationMode::Inner).unwrap();
        let outer = v.truncate(r, TruncationMode::Outer).unwrap();
        let x = Vec3::new(r - 2.0, 0.0, 0.0);
        assert_eq!(inner.eval(x), v.eval(x));
        assert_eq!(outer.eval(x), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let x = random_point(&mut rng, 8.0);
            let w = smooth_cutoff(x.norm(), CutoffSpec::new(r).unwrap());
            // V·ω + V·(1-ω) = V·(ω + 1 - ω) up to one rounding of the split
            let sum = inner.eval(x) + outer.eval(x);
            assert!((sum - v.eval(x)).abs() <= 2.0 * f64::EPSILON * v.eval(x).abs(), "{x:?}");
            if w == 0.0 || w == 1.0 {
                assert_eq!(sum, v.eval(x));
            }
        }
        assert!(matches!(v.truncate(1.0, TruncationMode::Inner), Err(FkError::Domain(_))));
        assert_eq!(inner.decay_radius(), r + 1.0);
        assert_eq!(inner.tail(), TailProfile::Zero);
    }

    #[test]
    fn double_inner_truncation_multiplies_cutoff() {
        let v = make_standard_potential(PotentialKind::GaussianBump, &[2.0, 0.5, 3.0]).unwrap();
        let r = 3.0;
        let once = v.truncate(r, TruncationMode::Inner).unwrap();
        let twice = once.truncate(r, TruncationMode::Inner).unwrap();
        for i in 0..=600 {
            let x = Vec3::new(0.01 * i as f64, 0.0, 0.0);
            let w = smooth_cutoff(x.norm(), CutoffSpec::new(r).unwrap());
            assert_eq!(twice.eval(x), once.eval(x) * w);
            if w == 0.0 || w == 1.0 {
                assert_eq!(twice.eval(x), once.eval(x));
            }
        }
    }

    #[test]
    fn outer_truncation_vanishes_inside() {
        let v = make_standard_potential(PotentialKind::PowerDecay, &[1.0, 4.0]).unwrap();
        let x = Vec3::new(3.0, 4.0, 0.0);
        for rho in [2.0, 4.0, 5.5, 6.0, 6.5, 10.0, 100.0] {
            let t = v.truncate(rho, TruncationMode::Outer).unwrap();
            if rho - 1.0 > x.norm() {
                assert_eq!(t.eval(x), 0.0);
            }
        }
    }

    #[test]
    fn bounds_are_sound() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for v in library() {
            for _ in 0..100_000 {
                let x = random_point(&mut rng, 12.0);
                assert!(v.eval(x).abs() <= v.bound(), "{} at {x:?}", v.label());
            }
        }
    }

    #[test]
    fn tail_profiles_dominate() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for v in library() {
            for _ in 0..50_000 {
                let x = random_point(&mut rng, 30.0);
                if x.norm() > v.decay_radius() {
                    assert!(
                        v.eval(x).abs() <= v.tail().at(x.norm()) * (1.0 + 1e-12) + 1e-300,
                        "{} at {x:?}",
                        v.label()
                    );
                }
            }
        }
    }

    #[test]
    fn tail_integrals() {
        // ∫_s^∞ (1+u²)^-2 du at s = 0 is π/4
        let p = TailProfile::Power { amplitude: 1.0, exponent: 4.0 };
        assert!((p.integral_from(0.0) - 0.25 * PI).abs() < 1e-15);
        // crude midpoint rule as an independent check
        let s0 = 3.0;
        let du = 1e-3;
        let numeric: f64 = (0..2_000_000).map(|i| p.at(s0 + (i as f64 + 0.5) * du) * du).sum();
        assert!((p.integral_from(s0) - numeric).abs() < 1e-6);
        let g = TailProfile::Gaussian { amplitude: 2.0, offset: 1.0, width: 0.5 };
        let numeric: f64 = (0..200_000).map(|i| g.at(1.0 + (i as f64 + 0.5) * 1e-4) * 1e-4).sum();
        assert!((g.integral_from(1.0) - numeric).abs() < 1e-8);
        assert_eq!(TailProfile::Constant(1.0).integral_from(5.0), f64::INFINITY);
        assert_eq!(TailProfile::Zero.integral_from(0.0), 0.0);
        let q = TailProfile::Power { amplitude: 1.0, exponent: 3.0 };
        assert!(q.integral_from(10.0) >= 0.0 && q.integral_from(10.0) <= 0.005 + 1e-15);
    }

    #[test]
    fn tail_mass_covers_the_green_integral() {
        // ∫ G(a, u) env(max(u, 0)) du by a fine midpoint rule
        let green = |v: &Potential, a: f64| {
            let du = 1e-3;
            let lo = a.min(0.0) - 20.0;
            (0..((a - lo + 200.0) / du) as usize)
                .map(|i| {
                    let u = lo + (i as f64 + 0.5) * du;
                    let w = if u >= a { 1.0 } else { (-2.0 * (a - u)).exp() };
                    w * v.envelope(u.max(0.0)) * du
                })
                .sum::<f64>()
        };
        let pots = [
            make_standard_potential(PotentialKind::PowerDecay, &[1.0, 4.0]).unwrap(),
            make_standard_potential(PotentialKind::GaussianBump, &[2.0, 1.0, 1.0]).unwrap(),
        ];
        for v in &pots {
            for a in [-1.0, 0.0, 0.3, 2.0, 5.0, 12.0] {
                let (t, g) = (v.tail_mass(a), green(v, a));
                assert!(t >= g * (1.0 - 1e-9), "{} a = {a}: {t} < {g}", v.label());
                assert!(t <= 1.7 * g, "{} a = {a}: {t} vs {g}", v.label());
            }
            let ts: Vec<f64> = (0..60).map(|i| v.tail_mass(-2.0 + 0.5 * i as f64)).collect();
            assert!(ts.windows(2).all(|w| w[1] <= w[0]));
        }
        let c = make_standard_potential(PotentialKind::Constant, &[0.5]).unwrap();
        assert_eq!(c.tail_mass(4.0), f64::INFINITY);
        assert_eq!(Potential::zero().tail_mass(-3.0), 0.0);
    }

    #[test]
    fn scaling() {
        let v = make_standard_potential(PotentialKind::GaussianBump, &[2.0, 0.0, 1.0]).unwrap();
        let s = v.scaled(-3.0);
        assert_eq!(s.eval(Vec3::ZERO), -6.0);
        assert_eq!(s.bound(), 6.0);
        assert_eq!(v.scaled(0.0).tail(), TailProfile::Zero);
    }
}
