//! Feynman–Kac path-integral estimators for three-dimensional scattering
//! amplitudes, together with a finite-difference oracle for the exit-time
//! representation they rest on.
//!
//! * [`math`]: drift magnitude, smooth cutoff, free Green's kernel
//! * [`potential`]: potentials, truncations, the standard library
//! * [`sde`]: Euler–Maruyama paths, functionals, exit sampling
//! * [`amplitudes`]: the amplitude estimators and the experiments built on them
//! * [`pde`]: the Dirichlet solver and the Monte Carlo cross-check

pub mod amplitudes;
pub mod error;
pub mod math;
pub mod pde;
pub mod potential;
pub mod rng;
pub mod sde;
pub mod sphere;
pub mod stats;
pub mod vec3;

pub use error::{FkError, Result};
pub use potential::{make_standard_potential, truncate, Potential, PotentialKind, TailProfile, TruncationMode};
pub use sde::{DriftField, FunctionalSample, PathConfig};
pub use stats::{ComplexEstimate, Estimate};
pub use vec3::Vec3;
