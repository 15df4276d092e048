//! Norms of data and solutions, evaluated mode by mode through Parseval.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::disk::VelocitySolution;
use crate::spectral::{BoundaryTrace, SpectralField};

/// Exponent `N` of the weight `(1 + |x|²)^N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightedNormParams {
    pub n: f64,
}

impl WeightedNormParams {
    pub fn new(n: f64) -> Self {
        assert!(n >= 0.0, "weight exponent must be nonnegative");
        Self { n }
    }

    pub fn unweighted() -> Self {
        Self { n: 0.0 }
    }
}

/// `(∫ |f|² (1 + |x|²)^N dx)^{1/2}` over the grid annulus.
pub fn l2_weighted_norm(field: &SpectralField, params: WeightedNormParams) -> f64 {
    let grid = field.grid();
    let weight: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&s| s * (1.0 + s * s).powf(params.n))
        .collect();
    let mut total = 0.0;
    for k in field.mode_indices() {
        let integrand: Vec<f64> = field
            .mode(k)
            .iter()
            .zip(&weight)
            .map(|(v, w)| v.norm_sqr() * w)
            .collect();
        total += grid.integrate_real(&integrand);
    }
    (2.0 * PI * total).sqrt()
}

/// `(Σ_k (|k| + 1)(|g_{φ,k}|² + |g_{r,k}|²))^{1/2}`.
pub fn h_half_boundary_norm(g: &BoundaryTrace) -> f64 {
    let k_max = g.max_mode() as i32;
    (-k_max..=k_max)
        .map(|k| (k.abs() as f64 + 1.0) * (g.g_phi(k).norm_sqr() + g.g_r(k).norm_sqr()))
        .sum::<f64>()
        .sqrt()
}

/// `‖∇v‖_{L₂}` over the grid annulus, with the full Cartesian gradient:
/// per mode `|v_r'|² + |v_φ'|² + |(ik v_r − v_φ)/r|² + |(ik v_φ + v_r)/r|²`.
///
/// Radial derivatives are second-order finite differences.
pub fn h1_seminorm(solution: &VelocitySolution) -> f64 {
    let grid = solution.grid();
    let mut total = 0.0;
    for mode in solution.modes() {
        let ik = Complex64::new(0.0, mode.k as f64);
        let dr = grid.derivative(&mode.v_r);
        let dp = grid.derivative(&mode.v_phi);
        let integrand: Vec<f64> = grid
            .nodes()
            .iter()
            .enumerate()
            .map(|(j, &s)| {
                let (vr, vp) = (mode.v_r[j], mode.v_phi[j]);
                let ang_r = (ik * vr - vp) / s;
                let ang_p = (ik * vp + vr) / s;
                (dr[j].norm_sqr() + dp[j].norm_sqr() + ang_r.norm_sqr() + ang_p.norm_sqr()) * s
            })
            .collect();
        total += grid.integrate_real(&integrand);
    }
    (2.0 * PI * total).sqrt()
}

/// `‖v − v∞‖_{L₂}` over the grid annulus.
pub fn l2_deviation(solution: &VelocitySolution) -> f64 {
    let grid = solution.grid();
    let far = solution.far_field;
    let mut total = 0.0;
    for mode in solution.modes() {
        let (fr, fp) = far.coefficients(mode.k);
        let integrand: Vec<f64> = grid
            .nodes()
            .iter()
            .enumerate()
            .map(|(j, &s)| ((mode.v_r[j] - fr).norm_sqr() + (mode.v_phi[j] - fp).norm_sqr()) * s)
            .collect();
        total += grid.integrate_real(&integrand);
    }
    (2.0 * PI * total).sqrt()
}

/// `‖v − v∞‖_{H¹} = (‖v − v∞‖²_{L₂} + ‖∇v‖²_{L₂})^{1/2}` over the grid annulus.
pub fn h1_deviation(solution: &VelocitySolution) -> f64 {
    l2_deviation(solution).hypot(h1_seminorm(solution))
}
