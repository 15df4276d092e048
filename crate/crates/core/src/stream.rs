//! Stream-function route for solenoidal flows with a no-slip boundary.
//!
//! With `ρ = 0` the velocity is `v = ∇^⊥ψ = (−∂₂ψ, ∂₁ψ)` and `Δψ = w`. Each
//! mode solves the radial boundary-value problem
//!
//! ```text
//! ψ_k'' + ψ_k'/r − k² ψ_k / r² = w_k,   ψ_k(r0) = 0,
//! ```
//!
//! matched at `R_max` to `a_k r^{|k|} + b r^{−|k|}` with `a_{±1}` fixed by the
//! far field `ψ → v2 x1 − v1 x2`. The mean mode takes zero circulation at
//! the boundary. The Neumann condition `∂_r ψ = 0` is not imposed; its
//! defect measures how far `w` is from admissible.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::disk::{FarField, ModeSolution, VelocitySolution};
use crate::error::{DivCurlError, Result};
use crate::grid::RadialGrid;
use crate::spectral::SpectralField;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Mode profiles `ψ_k` of a stream function vanishing on the boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct StreamFunction {
    grid: RadialGrid,
    max_mode: usize,
    modes: Vec<Vec<Complex64>>,
    pub boundary_constant: f64,
    pub far_field: FarField,
}

impl StreamFunction {
    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn max_mode(&self) -> usize {
        self.max_mode
    }

    pub fn mode(&self, k: i32) -> &[Complex64] {
        &self.modes[(k + self.max_mode as i32) as usize]
    }

    /// `ψ(r, φ)`, interpolating between nodes.
    pub fn value_at(&self, r: f64, phi: f64) -> Option<f64> {
        let mut acc = ZERO;
        for k in -(self.max_mode as i32)..=self.max_mode as i32 {
            acc += self.grid.interpolate(self.mode(k), r)? * Complex64::from_polar(1.0, k as f64 * phi);
        }
        Some(acc.re + self.boundary_constant)
    }

    /// Discrete `ψ_k'' + ψ_k'/r − k²ψ_k/r²` at interior nodes; the end
    /// entries are zero.
    pub fn laplacian(&self, k: i32) -> Vec<Complex64> {
        let op = RadialOperator::new(&self.grid, k);
        let h = self.grid.step();
        let psi = self.mode(k);
        let mut out = vec![ZERO; psi.len()];
        for j in 1..psi.len() - 1 {
            out[j] = (psi[j - 1] * op.lower[j] + psi[j] * op.diag[j] + psi[j + 1] * op.upper[j])
                / (h * h);
        }
        out
    }
}

/// Central-difference coefficients of the radial Laplacian in the grid
/// parameter `t`, multiplied by `h²` to keep the stencil sum free of
/// cancellation.
struct RadialOperator {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
}

impl RadialOperator {
    fn new(grid: &RadialGrid, k: i32) -> Self {
        let h = grid.step();
        let k2 = (k * k) as f64;
        let n = grid.len();
        let (mut lower, mut diag, mut upper) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        for (j, &s) in grid.nodes().iter().enumerate() {
            // ψ_ss = (ψ_tt − ψ_t j2/j1) / j1²
            let j1 = grid.jacobian_at(s);
            let j2 = grid.jacobian_slope_at(s);
            let p = 1.0 / (j1 * j1);
            let q = 1.0 / (s * j1) - j2 / (j1 * j1 * j1);
            lower[j] = p - 0.5 * q * h;
            diag[j] = -2.0 * p - h * h * k2 / (s * s);
            upper[j] = p + 0.5 * q * h;
        }
        Self { lower, diag, upper }
    }
}

/// Solves a tridiagonal system in place; `rhs` holds the solution on return.
fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [Complex64]) {
    let n = diag.len();
    let mut c_star = vec![0.0; n];
    let mut denom = diag[0];
    c_star[0] = upper[0] / denom;
    rhs[0] /= denom;
    for i in 1..n {
        denom = diag[i] - lower[i] * c_star[i - 1];
        c_star[i] = upper[i] / denom;
        let prev = rhs[i - 1];
        rhs[i] = (rhs[i] - prev * lower[i]) / denom;
    }
    for i in (0..n - 1).rev() {
        let next = rhs[i + 1];
        rhs[i] -= next * c_star[i];
    }
}

/// Far-field growth coefficient `a_k` of `ψ_k ~ a_k r^{|k|}`.
fn growth_coefficient(far: &FarField, k: i32) -> Complex64 {
    match k {
        1 => Complex64::new(far.v2, far.v1) * 0.5,
        -1 => Complex64::new(far.v2, -far.v1) * 0.5,
        _ => ZERO,
    }
}

fn solve_mode(grid: &RadialGrid, k: i32, w_k: &[Complex64], far: &FarField) -> Vec<Complex64> {
    let op = RadialOperator::new(grid, k);
    let n = grid.len();
    let m = k.abs();
    let h = grid.step();
    let rmax = grid.rmax();
    let (mut lower, mut diag, mut upper) = (op.lower, op.diag, op.upper);
    let mut rhs: Vec<Complex64> = w_k.iter().map(|w| w * (h * h)).collect();

    // Dirichlet at r0
    lower[0] = 0.0;
    diag[0] = 1.0;
    upper[0] = 0.0;
    rhs[0] = ZERO;

    // ψ' + (m/R) ψ = 2m a R^{m-1} at R_max through a ghost node
    let j1 = grid.jacobian_at(rmax);
    let beta = growth_coefficient(far, k) * (2.0 * m as f64 * rmax.powi(m - 1));
    let last = n - 1;
    let c = upper[last];
    lower[last] += c;
    diag[last] -= 2.0 * h * j1 * c * m as f64 / rmax;
    rhs[last] -= beta * (2.0 * h * j1 * c);
    upper[last] = 0.0;

    thomas(&lower, &diag, &upper, &mut rhs);
    rhs
}

/// `ψ_0` with `ψ_0(r0) = 0` and zero boundary circulation `ψ_0'(r0) = 0`.
fn solve_mean_mode(grid: &RadialGrid, w_0: &[Complex64]) -> Vec<Complex64> {
    // ψ_0' = (1/r) ∫_{r0}^r s w_0 ds, then one more cumulative trapezoid
    let slope = crate::disk::inner_cumulative(grid, w_0, 0);
    let s = grid.nodes();
    let half = 0.5 * grid.step();
    let mut psi = vec![ZERO; s.len()];
    for j in 0..s.len() - 1 {
        psi[j + 1] = psi[j]
            + (slope[j] * grid.jacobian_at(s[j]) + slope[j + 1] * grid.jacobian_at(s[j + 1])) * half;
    }
    psi
}

/// Stream function of the solenoidal no-slip problem with vorticity `w`.
///
/// Inadmissible vorticity is solved anyway; a warning reports the Neumann
/// defect, i.e. the slip velocity left on the boundary.
pub fn solve_stream(w: &SpectralField, far: FarField) -> Result<StreamFunction> {
    let grid = w.grid();
    if grid.len() < 3 {
        return Err(DivCurlError::InvalidGrid("stream solve needs three nodes".into()));
    }
    let k_max = w.max_mode() as i32;
    let modes = (-k_max..=k_max)
        .map(|k| {
            if k == 0 {
                solve_mean_mode(grid, w.mode(0))
            } else {
                solve_mode(grid, k, w.mode(k), &far)
            }
        })
        .collect();
    let psi = StreamFunction {
        grid: grid.clone(),
        max_mode: w.max_mode(),
        modes,
        boundary_constant: 0.0,
        far_field: far,
    };
    let defect = neumann_defect(&psi);
    let scale = 1.0 + w.max_abs() + far.v1.hypot(far.v2);
    if defect > 1e-6 * scale {
        log::warn!("vorticity is not admissible for a no-slip boundary: Neumann defect {defect:.3e}");
    }
    Ok(psi)
}

/// Velocity `∇^⊥ψ`: `v_{r,k} = −(ik/r) ψ_k`, `v_{φ,k} = ψ_k'`.
pub fn velocity_from_stream(psi: &StreamFunction) -> VelocitySolution {
    let grid = psi.grid();
    let k_max = psi.max_mode as i32;
    let modes = (-k_max..=k_max)
        .map(|k| {
            let profile = psi.mode(k);
            let ik = Complex64::new(0.0, k as f64);
            ModeSolution {
                k,
                v_r: profile
                    .iter()
                    .zip(grid.nodes())
                    .map(|(p, &s)| -ik * p / s)
                    .collect(),
                v_phi: grid.derivative(profile),
                alpha: ZERO,
            }
        })
        .collect();
    VelocitySolution::new(grid.clone(), modes, psi.far_field).expect("consistent mode layout")
}

/// `(∮ |∂_r ψ|² dl)^{1/2}` on the boundary circle.
pub fn neumann_defect(psi: &StreamFunction) -> f64 {
    let grid = psi.grid();
    let k_max = psi.max_mode as i32;
    let sum: f64 = (-k_max..=k_max)
        .map(|k| boundary_slope(grid, psi.mode(k)).norm_sqr())
        .sum();
    (2.0 * PI * grid.r0() * sum).sqrt()
}

/// One-sided second-order `ψ'(r0)`.
fn boundary_slope(grid: &RadialGrid, profile: &[Complex64]) -> Complex64 {
    let h = grid.step();
    let d = (profile[0] * -3.0 + profile[1] * 4.0 - profile[2]) / (2.0 * h);
    d / grid.jacobian_at(grid.r0())
}
