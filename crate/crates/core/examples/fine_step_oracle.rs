//! Fine-step (dt = 1e-5) reference values for the regression fixtures in
//! `tests/fixtures.rs`. Slow: about fifteen minutes on one core at the
//! default sample count.
//!
//! cargo run --release --example fine_step_oracle -- [n]

use fk_core::amplitudes::{estimate_a, estimate_b, estimate_bessel_expectation, summability_histogram};
use fk_core::sde::simulate_functional;
use fk_core::stats::{par_fold, Estimate, Moments};
use fk_core::{make_standard_potential, DriftField, PathConfig, PotentialKind, Vec3};

fn show(name: &str, e: &Estimate) {
    println!("{name}: mean = {:?}, stderr = {:?}, n = {}", e.mean, e.stderr, e.n);
}

fn main() {
    let n: u64 = std::env::args().nth(1).map_or(6000, |s| s.parse().expect("sample count"));
    let cfg = PathConfig { dt: 1e-5, t_max: 4.0, stop_radius: 2.0, master_seed: 0xf1e, ..PathConfig::default() };
    let g1 = make_standard_potential(PotentialKind::GaussianBump, &[1.0, 0.0, 1.0]).unwrap();
    let g2 = make_standard_potential(PotentialKind::GaussianBump, &[2.0, 0.0, 1.0]).unwrap();
    let half = make_standard_potential(PotentialKind::HalfSpace, &[1.0]).unwrap();
    let e1 = DriftField::Constant(Vec3::E1);

    let m = par_fold(
        n,
        Moments::default,
        |acc, i| acc.push(simulate_functional(&e1, &g1, &cfg, i).unwrap().integral_v),
        |a, b| a.merge(b),
    );
    show("integral_v gaussian_bump(1,0,1)", &Estimate::from_moments(&m, 0.0));
    show("a gaussian_bump(2,0,1)", &estimate_a(Vec3::E1, &g2, n, &cfg).unwrap());
    let b = estimate_b(Vec3::E1, &g2, 1.0, 8.0, n, &cfg).unwrap();
    println!(
        "b gaussian_bump(2,0,1) lambda 1 R 8: mean = {:?}, stderr = ({:?}, {:?})",
        b.mean, b.stderr_re, b.stderr_im
    );
    let occ = summability_histogram(&half, &DriftField::Constant(-Vec3::E1), n, 10, &cfg).unwrap();
    show("occupation half_space(1) drift -e1", &occ.integral);
    show("bessel gaussian_bump(2,0,1)", &estimate_bessel_expectation(&g2, n, &cfg).unwrap());
}
