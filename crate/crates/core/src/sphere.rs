//! Fibonacci lattice on the unit sphere.

use crate::vec3::Vec3;

/// `n` nearly uniform unit vectors: equal-area bands in `z`, azimuths
/// advanced by the golden angle.
pub fn fibonacci_lattice(n: usize) -> Vec<Vec3> {
    let golden_angle = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let (s, c) = (golden_angle * i as f64).sin_cos();
            Vec3::new(rho * c, rho * s, z)
        })
        .collect()
}
