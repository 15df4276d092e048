//! Exact mode-by-mode solution of the div-curl system outside the disk
//! `|x| > r0`.
//!
//! For each angular mode `k ≠ 0`, with `σ = sign k` and `m = |k|`, the
//! combinations `U = v_φ + i v_r` and `V = v_φ − i v_r` decouple:
//!
//! ```text
//! r^{k-1} (r^{1-k} U)' = w_k + i ρ_k,    r^{-k-1} (r^{k+1} V)' = w_k − i ρ_k
//! ```
//!
//! One combination decays like `r^{-m-1}` and is integrated outwards from
//! `r0`; it carries the boundary coefficient `α_k`. The other grows like
//! `r^{m-1}` and is integrated inwards from infinity. For `k ≥ 1` this is
//!
//! ```text
//! v_{r,k} = (i r^{-k-1}/2) ∫_{r0}^r s^{k+1}(w_k − iρ_k) ds
//!         + (i r^{k-1}/2) ∫_r^∞ s^{1-k}(w_k + iρ_k) ds + i α_k r^{-k-1} + v∞_{r,k}
//! v_{φ,k} = (r^{-k-1}/2) ∫_{r0}^r s^{k+1}(w_k − iρ_k) ds
//!         − (r^{k-1}/2) ∫_r^∞ s^{1-k}(w_k + iρ_k) ds + α_k r^{-k-1} + v∞_{φ,k}
//! ```
//!
//! with `α_k = r0^{k+1}/2 (g_{φ,k} − i g_{r,k})`. Negative modes use the
//! mirrored formulas, so complex-valued data is handled as well.
//!
//! Data are assumed supported in `[r0, R_max]`, which makes the integrals
//! to infinity exact truncations.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::compatibility::{moment_report, MomentReport};
use crate::error::{DivCurlError, Result};
use crate::grid::RadialGrid;
use crate::spectral::{polar_to_cartesian, BoundaryTrace, Point, SpectralField};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Constant velocity at infinity.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FarField {
    pub v1: f64,
    pub v2: f64,
}

impl FarField {
    pub fn new(v1: f64, v2: f64) -> Self {
        Self { v1, v2 }
    }

    pub fn is_zero(&self) -> bool {
        self.v1 == 0.0 && self.v2 == 0.0
    }

    /// Polar Fourier coefficients `(v∞_{r,k}, v∞_{φ,k})`; nonzero only for `|k| = 1`.
    pub fn coefficients(&self, k: i32) -> (Complex64, Complex64) {
        if k.abs() != 1 {
            return (ZERO, ZERO);
        }
        let kf = k as f64;
        let radial = Complex64::new(self.v1, -kf * self.v2) * 0.5;
        let angular = Complex64::new(self.v2, kf * self.v1) * 0.5;
        (radial, angular)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(self.v1 * factor, self.v2 * factor)
    }

    /// Trace of the irrotational, source-free flow past the disk of radius
    /// `r0` with this far field and zero circulation.
    ///
    /// The trace is purely tangential: `g_φ = 2 (v2 cos φ − v1 sin φ)`.
    pub fn slip_trace(&self, max_mode: usize) -> BoundaryTrace {
        let mut g = BoundaryTrace::zeros(max_mode);
        if max_mode >= 1 {
            g.set_g_phi(1, Complex64::new(self.v2, self.v1)).unwrap();
            g.set_g_phi(-1, Complex64::new(self.v2, -self.v1)).unwrap();
        }
        g
    }
}

/// Combined Fourier coefficients `(v∞_{φ,k} + i v∞_{r,k}, v∞_{φ,k} − i v∞_{r,k})`.
pub(crate) fn far_field_combinations(far: &FarField, k: i32) -> (Complex64, Complex64) {
    let (vr, vp) = far.coefficients(k);
    (vp + I * vr, vp - I * vr)
}

/// Boundary coefficient of the decaying homogeneous part of mode `k`.
///
/// For `k ≥ 1` this is `r0^{k+1}/2 (g_{φ,k} − i g_{r,k})`; for `k ≤ −1` the
/// mirrored `r0^{|k|+1}/2 (g_{φ,k} + i g_{r,k})`. The far-field share of the
/// boundary trace, nonzero only at `k = ±1`, cancels identically.
pub fn alpha_coefficient(g: &BoundaryTrace, r0: f64, k: i32) -> Result<Complex64> {
    if k == 0 {
        return Err(DivCurlError::InvalidMode {
            k,
            reason: "α_k is defined for k ≠ 0".into(),
        });
    }
    let sigma = k.signum() as f64;
    let m = k.abs();
    Ok((g.g_phi(k) - I * sigma * g.g_r(k)) * (0.5 * r0.powi(m + 1)))
}

/// Velocity profiles of a single angular mode.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeSolution {
    pub k: i32,
    pub v_r: Vec<Complex64>,
    pub v_phi: Vec<Complex64>,
    /// `α_k`; zero for `k = 0`.
    pub alpha: Complex64,
}

impl ModeSolution {
    fn zeros(k: i32, len: usize) -> Self {
        Self {
            k,
            v_r: vec![ZERO; len],
            v_phi: vec![ZERO; len],
            alpha: ZERO,
        }
    }
}

/// `s_j^{-p-1} ∫_{r0}^{s_j} s^{p+1} f ds` at every node, `p ≥ 0`.
pub(crate) fn inner_cumulative(grid: &RadialGrid, f: &[Complex64], p: i32) -> Vec<Complex64> {
    let s = grid.nodes();
    let half = 0.5 * grid.step();
    let mut out = vec![ZERO; s.len()];
    for j in 0..s.len() - 1 {
        let ratio = (s[j] / s[j + 1]).powi(p + 1);
        let jac_j = grid.jacobian_at(s[j]);
        let jac_n = grid.jacobian_at(s[j + 1]);
        out[j + 1] = out[j] * ratio + (f[j] * (ratio * jac_j) + f[j + 1] * jac_n) * half;
    }
    out
}

/// `s_j^{p-1} ∫_{s_j}^{R_max} s^{1-p} f ds` at every node, `p ≥ 1`.
pub(crate) fn outer_cumulative(grid: &RadialGrid, f: &[Complex64], p: i32) -> Vec<Complex64> {
    let s = grid.nodes();
    let half = 0.5 * grid.step();
    let n = s.len();
    let mut out = vec![ZERO; n];
    for j in (0..n - 1).rev() {
        let ratio = (s[j] / s[j + 1]).powi(p - 1);
        let jac_j = grid.jacobian_at(s[j]);
        let jac_n = grid.jacobian_at(s[j + 1]);
        out[j] = out[j + 1] * ratio + (f[j] * jac_j + f[j + 1] * (ratio * jac_n)) * half;
    }
    out
}

fn check_profiles(grid: &RadialGrid, w: &[Complex64], rho: &[Complex64]) -> Result<()> {
    for p in [w, rho] {
        if p.len() != grid.len() {
            return Err(DivCurlError::ShapeMismatch {
                expected: grid.len(),
                actual: p.len(),
            });
        }
    }
    Ok(())
}

/// Solves mode `k ≠ 0` from the vorticity and divergence profiles.
pub fn solve_mode(
    k: i32,
    grid: &RadialGrid,
    w_k: &[Complex64],
    rho_k: &[Complex64],
    g: &BoundaryTrace,
    far: &FarField,
) -> Result<ModeSolution> {
    if k == 0 {
        return Err(DivCurlError::InvalidMode {
            k,
            reason: "use solve_mode_zero for the mean mode".into(),
        });
    }
    check_profiles(grid, w_k, rho_k)?;
    let sigma = k.signum() as f64;
    let m = k.abs();
    let r0 = grid.r0();

    let decaying_src: Vec<Complex64> =
        w_k.iter().zip(rho_k).map(|(w, p)| w - I * sigma * p).collect();
    let growing_src: Vec<Complex64> =
        w_k.iter().zip(rho_k).map(|(w, p)| w + I * sigma * p).collect();
    let inner = inner_cumulative(grid, &decaying_src, m);
    let outer = outer_cumulative(grid, &growing_src, m);

    let (u_inf, v_inf) = far_field_combinations(far, k);
    let (dec_inf, grow_inf) = if sigma > 0.0 { (v_inf, u_inf) } else { (u_inf, v_inf) };
    let alpha = alpha_coefficient(g, r0, k)?;
    // the far-field share of g is already in dec_inf; α_k excludes it
    let two_alpha = 2.0 * alpha - dec_inf * r0.powi(m + 1);

    let mut sol = ModeSolution::zeros(k, grid.len());
    sol.alpha = alpha;
    for (j, &r) in grid.nodes().iter().enumerate() {
        let decaying = inner[j] + two_alpha * r.powi(-m - 1) + dec_inf;
        let growing = -outer[j] + grow_inf;
        let (u, v) = if sigma > 0.0 {
            (growing, decaying)
        } else {
            (decaying, growing)
        };
        sol.v_phi[j] = (u + v) * 0.5;
        sol.v_r[j] = (u - v) * (-0.5 * I);
    }
    Ok(sol)
}

/// Solves the mean mode: `v_{r,0} = (∫_{r0}^r sρ_0 ds + r0 g_{r,0}) / r` and
/// `v_{φ,0} = (∫_{r0}^r s w_0 ds + r0 g_{φ,0}) / r`.
pub fn solve_mode_zero(
    grid: &RadialGrid,
    w_0: &[Complex64],
    rho_0: &[Complex64],
    g: &BoundaryTrace,
) -> Result<ModeSolution> {
    check_profiles(grid, w_0, rho_0)?;
    let r0 = grid.r0();
    let flux = inner_cumulative(grid, rho_0, 0);
    let circ = inner_cumulative(grid, w_0, 0);
    let mut sol = ModeSolution::zeros(0, grid.len());
    for (j, &r) in grid.nodes().iter().enumerate() {
        sol.v_r[j] = flux[j] + g.g_r(0) * (r0 / r);
        sol.v_phi[j] = circ[j] + g.g_phi(0) * (r0 / r);
    }
    Ok(sol)
}

/// Data of a div-curl problem outside the disk of radius `grid.r0()`.
#[derive(Clone, Debug)]
pub struct DiskProblem {
    pub vorticity: SpectralField,
    pub divergence: SpectralField,
    pub boundary: BoundaryTrace,
    pub far_field: FarField,
}

impl DiskProblem {
    pub fn new(
        vorticity: SpectralField,
        divergence: SpectralField,
        boundary: BoundaryTrace,
        far_field: FarField,
    ) -> Result<Self> {
        vorticity.check_compatible(&divergence)?;
        if boundary.max_mode() > vorticity.max_mode() {
            return Err(DivCurlError::IncompatibleFields(format!(
                "boundary trace resolves |k| ≤ {} but the fields only |k| ≤ {}",
                boundary.max_mode(),
                vorticity.max_mode()
            )));
        }
        Ok(Self {
            vorticity,
            divergence,
            boundary,
            far_field,
        })
    }

    /// Problem with zero data on `grid` with modes `|k| ≤ max_mode`.
    pub fn zeros(grid: &RadialGrid, max_mode: usize) -> Self {
        Self {
            vorticity: SpectralField::zeros(grid, max_mode),
            divergence: SpectralField::zeros(grid, max_mode),
            boundary: BoundaryTrace::zeros(max_mode),
            far_field: FarField::default(),
        }
    }

    pub fn grid(&self) -> &RadialGrid {
        self.vorticity.grid()
    }

    pub fn r0(&self) -> f64 {
        self.grid().r0()
    }

    pub fn max_mode(&self) -> usize {
        self.vorticity.max_mode()
    }

    /// Largest data magnitude at `R_max`, relative to the largest value overall.
    pub fn relative_tail(&self) -> f64 {
        let scale = self.vorticity.max_abs().max(self.divergence.max_abs());
        if scale == 0.0 {
            return 0.0;
        }
        self.vorticity
            .tail_magnitude()
            .max(self.divergence.tail_magnitude())
            / scale
    }
}

/// Mode profiles of a velocity field outside the disk.
#[derive(Clone, Debug, PartialEq)]
pub struct VelocitySolution {
    grid: RadialGrid,
    max_mode: usize,
    modes: Vec<ModeSolution>,
    pub far_field: FarField,
}

impl VelocitySolution {
    pub fn new(
        grid: RadialGrid,
        modes: Vec<ModeSolution>,
        far_field: FarField,
    ) -> Result<Self> {
        if modes.len() % 2 != 1 {
            return Err(DivCurlError::InvalidParameter(
                "mode list must cover -K..=K".into(),
            ));
        }
        let max_mode = modes.len() / 2;
        for (i, m) in modes.iter().enumerate() {
            if m.k != i as i32 - max_mode as i32 {
                return Err(DivCurlError::InvalidParameter(format!(
                    "mode list out of order at position {i}"
                )));
            }
            check_profiles(&grid, &m.v_r, &m.v_phi)?;
        }
        Ok(Self {
            grid,
            max_mode,
            modes,
            far_field,
        })
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn max_mode(&self) -> usize {
        self.max_mode
    }

    pub fn modes(&self) -> &[ModeSolution] {
        &self.modes
    }

    pub fn mode(&self, k: i32) -> &ModeSolution {
        &self.modes[(k + self.max_mode as i32) as usize]
    }

    /// Real polar components `(v_r, v_φ)` at a node.
    pub fn polar_at_node(&self, j: usize, phi: f64) -> (f64, f64) {
        let mut vr = ZERO;
        let mut vp = ZERO;
        for m in &self.modes {
            let e = Complex64::from_polar(1.0, m.k as f64 * phi);
            vr += m.v_r[j] * e;
            vp += m.v_phi[j] * e;
        }
        (vr.re, vp.re)
    }

    /// Real polar components `(v_r, v_φ)` at radius `r`, interpolating profiles.
    pub fn polar_at(&self, r: f64, phi: f64) -> Option<(f64, f64)> {
        let mut vr = ZERO;
        let mut vp = ZERO;
        for m in &self.modes {
            let e = Complex64::from_polar(1.0, m.k as f64 * phi);
            vr += self.grid.interpolate(&m.v_r, r)? * e;
            vp += self.grid.interpolate(&m.v_phi, r)? * e;
        }
        Some((vr.re, vp.re))
    }

    /// Cartesian velocity at `p`; `None` outside `[r0, R_max]`.
    pub fn velocity_at(&self, p: Point) -> Option<Point> {
        let r = p[0].hypot(p[1]);
        let phi = p[1].atan2(p[0]);
        let (vr, vp) = self.polar_at(r, phi)?;
        let (sin, cos) = phi.sin_cos();
        Some([vr * cos - vp * sin, vr * sin + vp * cos])
    }

    /// Cartesian velocity at node `j` and angle `phi`.
    pub fn velocity_at_node(&self, j: usize, phi: f64) -> (Point, Point) {
        let (vr, vp) = self.polar_at_node(j, phi);
        let (sin, cos) = phi.sin_cos();
        let s = self.grid.nodes()[j];
        (
            polar_to_cartesian(s, phi),
            [vr * cos - vp * sin, vr * sin + vp * cos],
        )
    }

    /// Fourier coefficients of the solution at `r = r0`.
    pub fn boundary_trace(&self) -> BoundaryTrace {
        let g_r = self.modes.iter().map(|m| m.v_r[0]).collect();
        let g_phi = self.modes.iter().map(|m| m.v_phi[0]).collect();
        BoundaryTrace::from_coefficients(self.max_mode, g_r, g_phi).expect("consistent lengths")
    }

    /// Circulation `∮ v·dl` around the circle through node `j`.
    pub fn circulation_at_node(&self, j: usize) -> f64 {
        2.0 * PI * self.grid.nodes()[j] * self.mode(0).v_phi[j].re
    }

    /// Flux `∮ (v, n) dl` through the circle through node `j`.
    pub fn flux_at_node(&self, j: usize) -> f64 {
        2.0 * PI * self.grid.nodes()[j] * self.mode(0).v_r[j].re
    }

    /// Largest nodal difference of mode profiles against another solution.
    pub fn max_difference(&self, other: &VelocitySolution) -> f64 {
        let mut worst: f64 = 0.0;
        for k in -(self.max_mode.min(other.max_mode) as i32)..=self.max_mode.min(other.max_mode) as i32 {
            let (a, b) = (self.mode(k), other.mode(k));
            for (x, y) in a.v_r.iter().zip(&b.v_r).chain(a.v_phi.iter().zip(&b.v_phi)) {
                worst = worst.max((x - y).norm());
            }
        }
        worst
    }

    /// Largest nodal mode magnitude.
    pub fn max_abs(&self) -> f64 {
        self.modes
            .iter()
            .flat_map(|m| m.v_r.iter().chain(&m.v_phi))
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    /// `self + other`, for solutions on the same grid and mode range.
    pub fn sum(&self, other: &VelocitySolution) -> Result<VelocitySolution> {
        if self.grid != other.grid || self.max_mode != other.max_mode {
            return Err(DivCurlError::IncompatibleFields(
                "solutions live on different grids".into(),
            ));
        }
        let modes = self
            .modes
            .iter()
            .zip(&other.modes)
            .map(|(a, b)| ModeSolution {
                k: a.k,
                v_r: a.v_r.iter().zip(&b.v_r).map(|(x, y)| x + y).collect(),
                v_phi: a.v_phi.iter().zip(&b.v_phi).map(|(x, y)| x + y).collect(),
                alpha: a.alpha + b.alpha,
            })
            .collect();
        Ok(VelocitySolution {
            grid: self.grid.clone(),
            max_mode: self.max_mode,
            modes,
            far_field: FarField::new(
                self.far_field.v1 + other.far_field.v1,
                self.far_field.v2 + other.far_field.v2,
            ),
        })
    }
}

/// Solves every mode `|k| ≤ K` of a disk problem.
///
/// The formulas are evaluated whether or not the data satisfy the moment
/// conditions; see [`solve_disk_checked`] for the accompanying report.
pub fn solve_disk(problem: &DiskProblem) -> Result<VelocitySolution> {
    let grid = problem.grid();
    let k_max = problem.max_mode() as i32;
    let tail = problem.relative_tail();
    if tail > 1e-10 {
        log::warn!(
            "data does not vanish at R_max = {} (relative tail {tail:.2e}); \
             contributions beyond the grid are truncated",
            grid.rmax()
        );
    }
    let mut modes = Vec::with_capacity(2 * k_max as usize + 1);
    for k in -k_max..=k_max {
        let w = problem.vorticity.mode(k);
        let rho = problem.divergence.mode(k);
        let mode = if k == 0 {
            solve_mode_zero(grid, w, rho, &problem.boundary)?
        } else {
            solve_mode(k, grid, w, rho, &problem.boundary, &problem.far_field)?
        };
        modes.push(mode);
    }
    VelocitySolution::new(grid.clone(), modes, problem.far_field)
}

/// Velocity together with the compatibility report of its data.
#[derive(Clone, Debug)]
pub struct DiskSolution {
    pub velocity: VelocitySolution,
    pub report: MomentReport,
}

/// [`solve_disk`] plus the moment report; inadmissible data produce a
/// warning, not an error.
pub fn solve_disk_checked(problem: &DiskProblem, tolerance: f64) -> Result<DiskSolution> {
    let report = moment_report(problem, tolerance);
    if !report.admissible {
        log::warn!(
            "data violate the solvability conditions (max moment residual {:.3e}, \
             circulation/flux residual {:.3e}); the boundary trace will not be matched",
            report.max_residual(),
            report.circulation.norm()
        );
    }
    Ok(DiskSolution {
        velocity: solve_disk(problem)?,
        report,
    })
}
