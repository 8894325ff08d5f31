//! Finite-difference oracle for the exit-time representation:
//!
//! ```text
//! ½Δφ + φ_{x₁} - (i/2)Vφ = -F  in |x| < r,   φ = 0 on |x| = r
//! ```
//!
//! The ball is embedded in the cube `[-r, r]³` with a uniform grid. Interior
//! nodes carry the 7-point Laplacian and a centered (or upwind) difference
//! for `φ_{x₁}`. A neighbour outside the ball is replaced by a ghost value
//! extrapolated linearly through the node and the true sphere crossing on
//! that grid line, which keeps the scheme second order despite the
//! staircase mask. The complex system is solved with Jacobi-preconditioned
//! BiCGSTAB.

use std::io::{self, BufRead, Read, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{config, domain, FkError, Result};
use crate::potential::Potential;
use crate::sde::PathConfig;
use crate::sde::{check_exit_args, exit_unchecked, EXIT_CAP_FACTOR};
use crate::stats::{par_fold, ComplexEstimate, ComplexMoments};
use crate::vec3::Vec3;

pub const SOLVER_TOL: f64 = 1e-8;
pub const MAX_ITERATIONS: usize = 100_000;

const NONE: u32 = u32::MAX;

/// Difference scheme for the `φ_{x₁}` term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriftScheme {
    #[default]
    Centered,
    Upwind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub drift_on: bool,
    pub scheme: DriftScheme,
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { drift_on: true, scheme: DriftScheme::Centered, tol: SOLVER_TOL, max_iterations: MAX_ITERATIONS }
    }
}

/// Solution on the nodes of `[-r, r]³`; zero off the ball.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSolution {
    pub h: f64,
    pub r: f64,
    /// Nodes per axis.
    pub nodes: usize,
    pub values: Vec<Complex64>,
    pub interior: Vec<bool>,
    pub iterations: usize,
    pub residual: f64,
}

impl GridSolution {
    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.nodes + j) * self.nodes + k
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.r + i as f64 * self.h
    }

    pub fn node(&self, i: usize, j: usize, k: usize) -> Vec3 {
        Vec3::new(self.coord(i), self.coord(j), self.coord(k))
    }

    pub fn interior_count(&self) -> usize {
        self.interior.iter().filter(|&&b| b).count()
    }

    /// Trilinear interpolation; zero outside the cube.
    pub fn value_at(&self, x: Vec3) -> Complex64 {
        let last = self.nodes - 1;
        let locate = |c: f64| -> Option<(usize, f64)> {
            let u = (c + self.r) / self.h;
            if !(u >= 0.0 && u <= last as f64) {
                return None;
            }
            let i = (u.floor() as usize).min(last - 1);
            Some((i, u - i as f64))
        };
        let (Some((i, fx)), Some((j, fy)), Some((k, fz))) = (locate(x.x), locate(x.y), locate(x.z)) else {
            return Complex64::new(0.0, 0.0);
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for (di, wx) in [(0, 1.0 - fx), (1, fx)] {
            for (dj, wy) in [(0, 1.0 - fy), (1, fy)] {
                for (dk, wz) in [(0, 1.0 - fz), (1, fz)] {
                    let w = wx * wy * wz;
                    if w != 0.0 {
                        acc += self.values[self.index(i + di, j + dj, k + dk)] * w;
                    }
                }
            }
        }
        acc
    }

    /// CSV rows `i,j,k,re,im` for interior nodes.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "i,j,k,re,im")?;
        for i in 0..self.nodes {
            for j in 0..self.nodes {
                for k in 0..self.nodes {
                    let idx = self.index(i, j, k);
                    if self.interior[idx] {
                        let v = self.values[idx];
                        writeln!(w, "{i},{j},{k},{},{}", v.re, v.im)?;
                    }
                }
            }
        }
        Ok(())
    }

    /// Text header describing the binary payload written by [`Self::write_binary`].
    pub fn write_header<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "format = fk-grid-v1")?;
        writeln!(w, "nodes = {}", self.nodes)?;
        writeln!(w, "h = {}", self.h)?;
        writeln!(w, "r = {}", self.r)?;
        writeln!(w, "layout = complex128-le, index (i * nodes + j) * nodes + k, re then im")?;
        Ok(())
    }

    /// All node values as little-endian `(re, im)` f64 pairs.
    pub fn write_binary<W: Write>(&self, mut w: W) -> io::Result<()> {
        for v in &self.values {
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
        Ok(())
    }

    /// Read back a header/binary pair. The interior mask is recomputed from `r`.
    pub fn read_binary<H: BufRead, B: Read>(header: H, mut body: B) -> io::Result<GridSolution> {
        let bad = |m: &str| io::Error::new(io::ErrorKind::InvalidData, m.to_string());
        let (mut nodes, mut h, mut r) = (None, None, None);
        for line in header.lines() {
            let line = line?;
            if let Some((key, val)) = line.split_once('=') {
                match key.trim() {
                    "format" if val.trim() != "fk-grid-v1" => return Err(bad("unknown grid format")),
                    "nodes" => nodes = val.trim().parse::<usize>().ok(),
                    "h" => h = val.trim().parse::<f64>().ok(),
                    "r" => r = val.trim().parse::<f64>().ok(),
                    _ => {}
                }
            }
        }
        let (Some(nodes), Some(h), Some(r)) = (nodes, h, r) else {
            return Err(bad("header is missing nodes, h or r"));
        };
        let total = nodes * nodes * nodes;
        let mut buf = vec![0u8; 16 * total];
        body.read_exact(&mut buf)?;
        let values = buf
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..].try_into().unwrap()),
                )
            })
            .collect();
        let grid = Grid { n: nodes, h, r };
        let interior = (0..total).map(|idx| grid.is_interior(grid.point(idx))).collect();
        Ok(GridSolution { h, r, nodes, values, interior, iterations: 0, residual: 0.0 })
    }
}

#[derive(Clone, Copy)]
struct Grid {
    n: usize,
    h: f64,
    r: f64,
}

impl Grid {
    fn new(r: f64, h: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(config(format!("ball radius must be positive, got {r}")));
        }
        if !(h > 0.0) || h > r / 10.0 * (1.0 + 1e-12) {
            return Err(config(format!("grid spacing must lie in (0, r/10] = (0, {}], got {h}", r / 10.0)));
        }
        let cells = (2.0 * r / h).round();
        if (cells * h - 2.0 * r).abs() > 1e-9 * r {
            return Err(config(format!("grid spacing {h} does not divide the cube side {}", 2.0 * r)));
        }
        let n = cells as usize + 1;
        if n.pow(3) >= NONE as usize {
            return Err(config(format!("grid with {n}³ nodes is too large")));
        }
        Ok(Self { n, h, r })
    }

    fn point(&self, idx: usize) -> Vec3 {
        let k = idx % self.n;
        let j = (idx / self.n) % self.n;
        let i = idx / (self.n * self.n);
        let c = |a: usize| -self.r + a as f64 * self.h;
        Vec3::new(c(i), c(j), c(k))
    }

    fn is_interior(&self, x: Vec3) -> bool {
        self.r - x.norm() > 1e-12 * self.h
    }
}

/// Row of the discrete operator for one interior unknown.
#[derive(Clone, Copy)]
struct Row {
    diag: Complex64,
    nbr: [u32; 6],
    coef: [f64; 6],
}

struct System {
    rows: Vec<Row>,
    /// Grid index of each unknown.
    cells: Vec<usize>,
}

impl System {
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        y.par_iter_mut().zip(self.rows.par_iter()).enumerate().for_each(|(p, (out, row))| {
            let mut acc = row.diag * x[p];
            for (&q, &c) in row.nbr.iter().zip(&row.coef) {
                if q != NONE {
                    acc += x[q as usize] * c;
                }
            }
            *out = acc;
        });
    }
}

/// Distance fraction `θ ∈ (0, 1]` from interior node `x` to the sphere along `dir`.
fn boundary_fraction(x: Vec3, dir: Vec3, h: f64, r: f64) -> f64 {
    // |x + s dir|² = r², dir a unit axis vector, take the positive root
    let b = x.dot(dir);
    let c = x.norm_sq() - r * r;
    let s = -b + (b * b - c).max(0.0).sqrt();
    (s / h).clamp(1e-6, 1.0)
}

fn assemble(grid: &Grid, v: &Potential, opts: &SolverOptions) -> System {
    let n = grid.n;
    let total = n * n * n;
    let mut unknown = vec![NONE; total];
    let mut cells = Vec::new();
    for idx in 0..total {
        if grid.is_interior(grid.point(idx)) {
            unknown[idx] = cells.len() as u32;
            cells.push(idx);
        }
    }
    let h = grid.h;
    let lap = 0.5 / (h * h);
    let strides = [n * n, n, 1];
    let axes = [Vec3::E1, Vec3::E2, Vec3::E3];
    let rows = cells
        .par_iter()
        .map(|&idx| {
            let x = grid.point(idx);
            // -(½Δ + ∂₁ - (i/2)V)
            let mut diag = Complex64::new(6.0 * lap, 0.5 * v.eval(x));
            let mut nbr = [NONE; 6];
            let mut coef = [0.0; 6];
            for axis in 0..3 {
                for (slot, sign) in [(2 * axis, 1.0), (2 * axis + 1, -1.0)] {
                    let mut c = -lap;
                    if axis == 0 && opts.drift_on {
                        match opts.scheme {
                            DriftScheme::Centered => c -= sign / (2.0 * h),
                            DriftScheme::Upwind => {
                                if sign > 0.0 {
                                    c -= 1.0 / h;
                                    diag += 1.0 / h;
                                }
                            }
                        }
                    }
                    let neighbour = if sign > 0.0 { idx + strides[axis] } else { idx - strides[axis] };
                    let q = unknown[neighbour];
                    if q != NONE {
                        nbr[slot] = q;
                        coef[slot] = c;
                    } else {
                        // ghost = φ_p (1 - 1/θ)
                        let theta = boundary_fraction(x, axes[axis] * sign, h, grid.r);
                        diag += c * (1.0 - 1.0 / theta);
                    }
                }
            }
            Row { diag, nbr, coef }
        })
        .collect();
    System { rows, cells }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).fold(Complex64::new(0.0, 0.0), |acc, (x, y)| acc + x.conj() * y)
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Jacobi-preconditioned BiCGSTAB from a zero initial guess. Returns the
/// solution, iteration count and final relative residual.
fn bicgstab(sys: &System, b: &[Complex64], tol: f64, max_iter: usize) -> Result<(Vec<Complex64>, usize, f64)> {
    let m = b.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut x = vec![zero; m];
    let b_norm = norm(b);
    if b_norm == 0.0 {
        return Ok((x, 0, 0.0));
    }
    let inv_diag: Vec<Complex64> = sys.rows.iter().map(|r| r.diag.inv()).collect();
    let mut r = b.to_vec();
    let r_hat = r.clone();
    let (mut rho_old, mut alpha, mut omega) =
        (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
    let mut v = vec![zero; m];
    let mut p = vec![zero; m];
    let mut y = vec![zero; m];
    let mut z = vec![zero; m];
    let mut s = vec![zero; m];
    let mut t = vec![zero; m];
    let mut residual = 1.0;
    let breakdown =
        |reason: &str, it: usize, res: f64| FkError::Solver { reason: reason.into(), iterations: it, residual: res };

    for it in 1..=max_iter {
        let rho = dot(&r_hat, &r);
        if rho.norm() == 0.0 || !rho.is_finite() {
            return Err(breakdown("BiCGSTAB breakdown (rho = 0)", it, residual));
        }
        let beta = (rho / rho_old) * (alpha / omega);
        for i in 0..m {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
            y[i] = inv_diag[i] * p[i];
        }
        sys.apply(&y, &mut v);
        let denom = dot(&r_hat, &v);
        if denom.norm() == 0.0 {
            return Err(breakdown("BiCGSTAB breakdown (<r̂, v> = 0)", it, residual));
        }
        alpha = rho / denom;
        for i in 0..m {
            s[i] = r[i] - alpha * v[i];
        }
        let s_res = norm(&s) / b_norm;
        if s_res <= tol {
            for i in 0..m {
                x[i] += alpha * y[i];
            }
            return Ok((x, it, s_res));
        }
        for i in 0..m {
            z[i] = inv_diag[i] * s[i];
        }
        sys.apply(&z, &mut t);
        let tt = dot(&t, &t);
        if tt.norm() == 0.0 {
            return Err(breakdown("BiCGSTAB breakdown (t = 0)", it, s_res));
        }
        omega = dot(&t, &s) / tt;
        for i in 0..m {
            x[i] += alpha * y[i] + omega * z[i];
            r[i] = s[i] - omega * t[i];
        }
        residual = norm(&r) / b_norm;
        if !residual.is_finite() {
            return Err(breakdown("BiCGSTAB diverged", it, residual));
        }
        if residual <= tol {
            return Ok((x, it, residual));
        }
        if omega.norm() == 0.0 {
            return Err(breakdown("BiCGSTAB breakdown (omega = 0)", it, residual));
        }
        rho_old = rho;
    }
    Err(breakdown("iteration budget exhausted", max_iter, residual))
}

/// Solve the Dirichlet problem on the ball of radius `r` with spacing `h`.
pub fn solve_dirichlet(v: &Potential, f: &Potential, r: f64, h: f64, drift_on: bool) -> Result<GridSolution> {
    solve_dirichlet_with(v, f, r, h, &SolverOptions { drift_on, ..Default::default() })
}

pub fn solve_dirichlet_with(
    v: &Potential,
    f: &Potential,
    r: f64,
    h: f64,
    opts: &SolverOptions,
) -> Result<GridSolution> {
    let grid = Grid::new(r, h)?;
    solve_on(&grid, v, f, opts)
}

fn solve_on(grid: &Grid, v: &Potential, f: &Potential, opts: &SolverOptions) -> Result<GridSolution> {
    let sys = assemble(grid, v, opts);
    let rhs: Vec<Complex64> = sys.cells.iter().map(|&idx| Complex64::new(f.eval(grid.point(idx)), 0.0)).collect();
    let (x, iterations, residual) = bicgstab(&sys, &rhs, opts.tol, opts.max_iterations)?;
    let total = grid.n.pow(3);
    let mut values = vec![Complex64::new(0.0, 0.0); total];
    let mut interior = vec![false; total];
    for (&idx, val) in sys.cells.iter().zip(x) {
        values[idx] = val;
        interior[idx] = true;
    }
    Ok(GridSolution { h: grid.h, r: grid.r, nodes: grid.n, values, interior, iterations, residual })
}

/// Max-norm nodal error against the exact solution `(r² - |x|²)/3` of the
/// drift-off problem with `V = 0`, `F = 1`, one entry per spacing.
pub fn analytic_refinement(r: f64, hs: &[f64]) -> Result<Vec<(f64, f64)>> {
    let one = Potential::from_fn("one", 1.0, |_| 1.0);
    hs.iter()
        .map(|&h| {
            let sol = solve_dirichlet(&Potential::zero(), &one, r, h, false)?;
            let err = (0..sol.values.len())
                .filter(|&idx| sol.interior[idx])
                .map(|idx| {
                    let n = sol.nodes;
                    let x = sol.node(idx / (n * n), (idx / n) % n, idx % n);
                    (sol.values[idx].re - (r * r - x.norm_sq()) / 3.0).abs()
                })
                .fold(0.0, f64::max);
            Ok((h, err))
        })
        .collect()
}

/// Max-norm residual of the discrete system on interior nodes, relative to
/// the max-norm of the right-hand side.
pub fn discrete_residual(sol: &GridSolution, v: &Potential, f: &Potential, opts: &SolverOptions) -> Result<f64> {
    let grid = Grid::new(sol.r, sol.h)?;
    let sys = assemble(&grid, v, opts);
    let x: Vec<Complex64> = sys.cells.iter().map(|&idx| sol.values[idx]).collect();
    let mut ax = vec![Complex64::new(0.0, 0.0); x.len()];
    sys.apply(&x, &mut ax);
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for (p, &idx) in sys.cells.iter().enumerate() {
        let rhs = f.eval(grid.point(idx));
        worst = worst.max((ax[p] - rhs).norm());
        scale = scale.max(rhs.abs());
    }
    Ok(if scale > 0.0 { worst / scale } else { worst })
}

/// Both sides of the exit-time representation at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McPdeReport {
    pub point: Vec3,
    pub r: f64,
    pub h: f64,
    pub mc: ComplexEstimate,
    pub fd: Complex64,
    /// Value from the coarser grid used for the discretization estimate.
    pub fd_coarse: Complex64,
    pub coarse_h: f64,
    /// Richardson estimate of the fine-grid error.
    pub discretization_error: f64,
    pub abs_diff: f64,
    pub rel_diff: f64,
    /// `hypot(|MC stderr|, discretization_error)`
    pub combined_uncertainty: f64,
    pub fd_iterations: usize,
    pub fd_residual: f64,
    /// Monte Carlo paths still inside the ball at the time cap.
    pub capped_paths: u64,
    pub exit_time_cap: f64,
}

/// Monte Carlo mean of [`sample_exit`](crate::sde::sample_exit) at `x`
/// against the interpolated finite-difference solution.
#[allow(clippy::too_many_arguments)]
pub fn mc_vs_pde(
    v: &Potential,
    f: &Potential,
    r: f64,
    x: Vec3,
    h: f64,
    n: u64,
    cfg: &PathConfig,
    drift_on: bool,
) -> Result<McPdeReport> {
    let cfg = cfg.with_start(x);
    check_exit_args(r, &cfg)?;
    if n == 0 {
        return Err(config("sample count must be positive"));
    }
    if !(x.norm() < r) {
        return Err(domain(format!("query point {x:?} is outside the ball")));
    }
    let grid = Grid::new(r, h)?;
    let opts = SolverOptions { drift_on, ..Default::default() };
    let fine = solve_on(&grid, v, f, &opts)?;
    let coarse_cells = ((grid.n - 1) / 2).max(2);
    let coarse_grid = Grid { n: coarse_cells + 1, h: 2.0 * r / coarse_cells as f64, r };
    let coarse = solve_on(&coarse_grid, v, f, &opts)?;
    let fd = fine.value_at(x);
    let fd_coarse = coarse.value_at(x);
    let ratio = (coarse_grid.h / h).powi(2);
    let discretization_error = (fd - fd_coarse).norm() / (ratio - 1.0);

    let (m, capped) = par_fold(
        n,
        || (ComplexMoments::default(), 0u64),
        |acc, i| {
            let s = exit_unchecked(r, |p| (v.eval(p), f.eval(p)), &cfg, i, drift_on);
            acc.0.push(s.value);
            acc.1 += s.capped as u64;
        },
        |a, b| {
            a.0.merge(b.0);
            a.1 += b.1;
        },
    );
    let mc = ComplexEstimate::from_moments(&m, 0.0);
    let abs_diff = (mc.mean - fd).norm();
    let rel_diff = if fd.norm() > 0.0 {
        abs_diff / fd.norm()
    } else if abs_diff == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(McPdeReport {
        point: x,
        r,
        h,
        mc,
        fd,
        fd_coarse,
        coarse_h: coarse_grid.h,
        discretization_error,
        abs_diff,
        rel_diff,
        combined_uncertainty: mc.stderr_re.hypot(mc.stderr_im).hypot(discretization_error),
        fd_iterations: fine.iterations,
        fd_residual: fine.residual,
        capped_paths: capped,
        exit_time_cap: EXIT_CAP_FACTOR * r * r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{make_standard_potential, PotentialKind};

    fn one() -> Potential {
        make_standard_potential(PotentialKind::Constant, &[1.0]).unwrap()
    }

    #[test]
    fn homogeneous_problem_has_zero_solution() {
        let sol = solve_dirichlet(&Potential::zero(), &Potential::zero(), 1.0, 0.1, true).unwrap();
        assert!(sol.values.iter().all(|v| *v == Complex64::new(0.0, 0.0)));
        assert_eq!(sol.iterations, 0);
    }

    #[test]
    fn grid_checks() {
        let z = Potential::zero();
        assert!(matches!(solve_dirichlet(&z, &z, 1.0, 0.2, true), Err(FkError::Config(_))));
        assert!(matches!(solve_dirichlet(&z, &z, 1.0, 0.07, true), Err(FkError::Config(_))));
        assert!(solve_dirichlet(&z, &z, 1.0, 0.1, true).is_ok());
    }

    #[test]
    fn quadratic_solution_drift_off() {
        let r = 1.0;
        let sol = solve_dirichlet(&Potential::zero(), &one(), r, 0.05, false).unwrap();
        let c = sol.value_at(Vec3::ZERO);
        assert!((c.re - 1.0 / 3.0).abs() < 1e-3, "{c}");
        assert!(c.im.abs() < 1e-12);
        for (idx, &inside) in sol.interior.iter().enumerate() {
            if !inside {
                assert_eq!(sol.values[idx], Complex64::new(0.0, 0.0));
            } else {
                // discrete maximum principle
                assert!(sol.values[idx].re >= 0.0);
            }
        }
    }

    #[test]
    fn residual_within_tolerance() {
        let v = make_standard_potential(PotentialKind::GaussianBump, &[1.0, 0.0, 1.0]).unwrap();
        let f = make_standard_potential(PotentialKind::BallBump, &[1.0, 0.0, 1.0]).unwrap();
        let sol = solve_dirichlet(&v, &f, 2.0, 0.2, true).unwrap();
        assert!(sol.residual <= SOLVER_TOL);
        let res = discrete_residual(&sol, &v, &f, &SolverOptions::default()).unwrap();
        assert!(res < 1e-6, "{res}");
    }

    #[test]
    fn negated_potential_conjugates_exactly() {
        let v = make_standard_potential(PotentialKind::GaussianBump, &[1.5, 0.3, 0.8]).unwrap();
        let f = make_standard_potential(PotentialKind::BallBump, &[1.0, 0.0, 1.0]).unwrap();
        let a = solve_dirichlet(&v, &f, 1.0, 0.1, true).unwrap();
        let b = solve_dirichlet(&v.scaled(-1.0), &f, 1.0, 0.1, true).unwrap();
        assert_eq!(a.iterations, b.iterations);
        for (x, y) in a.values.iter().zip(&b.values) {
            assert_eq!(*x, y.conj());
        }
    }

    #[test]
    fn upwind_scheme_is_close_to_centered() {
        let z = Potential::zero();
        let a = solve_dirichlet_with(&z, &one(), 1.0, 0.05, &SolverOptions::default()).unwrap();
        let b = solve_dirichlet_with(
            &z,
            &one(),
            1.0,
            0.05,
            &SolverOptions { scheme: DriftScheme::Upwind, ..Default::default() },
        )
        .unwrap();
        let (ca, cb) = (a.value_at(Vec3::ZERO).re, b.value_at(Vec3::ZERO).re);
        assert!((ca - cb).abs() < 0.05 * ca, "{ca} {cb}");
    }

    #[test]
    fn binary_roundtrip() {
        let sol = solve_dirichlet(&Potential::zero(), &one(), 1.0, 0.1, true).unwrap();
        let (mut head, mut body) = (Vec::new(), Vec::new());
        sol.write_header(&mut head).unwrap();
        sol.write_binary(&mut body).unwrap();
        let back = GridSolution::read_binary(&head[..], &body[..]).unwrap();
        assert_eq!(back.values, sol.values);
        assert_eq!(back.interior, sol.interior);
        let mut csv = Vec::new();
        sol.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert_eq!(text.lines().count(), sol.interior_count() + 1);
    }

    #[test]
    fn interpolation_reproduces_nodes() {
        let sol = solve_dirichlet(&Potential::zero(), &one(), 1.0, 0.1, true).unwrap();
        let (i, j, k) = (7, 9, 12);
        let x = sol.node(i, j, k);
        assert!((sol.value_at(x) - sol.values[sol.index(i, j, k)]).norm() < 1e-14);
        assert_eq!(sol.value_at(Vec3::new(5.0, 0.0, 0.0)), Complex64::new(0.0, 0.0));
    }
}
