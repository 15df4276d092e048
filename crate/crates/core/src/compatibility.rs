//! Solvability conditions of the exterior problem.
//!
//! A velocity with the prescribed divergence, vorticity and far field can
//! match the boundary trace only if, for every `k ≥ 1`,
//!
//! ```text
//! r0^{k-1} ∫_{r0}^∞ s^{1-k} (w_k + iρ_k) ds + g_{φ,k} + i g_{r,k} = v∞_{φ,k} + i v∞_{r,k}
//! ```
//!
//! (mirrored for `k ≤ −1`), and the total circulation and flux vanish. The
//! residuals below are left side minus right side.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::disk::{far_field_combinations, DiskProblem, FarField};
use crate::error::{DivCurlError, Result};
use crate::source::Bump;
use crate::spectral::{BoundaryTrace, SpectralField};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Default absolute tolerance for admissibility.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

/// `r0^{m-1} ∫ s^{1-m} f ds` over the whole grid, `m = |k|`.
fn growing_moment(field: &SpectralField, f: &[Complex64], k: i32) -> Complex64 {
    let grid = field.grid();
    let r0 = grid.r0();
    let m = k.abs();
    let weighted: Vec<Complex64> = grid
        .nodes()
        .iter()
        .zip(f)
        .map(|(&s, v)| v * (r0 / s).powi(m - 1))
        .collect();
    grid.integrate(&weighted)
}

fn check_mode(k: i32, field: &SpectralField) -> Result<()> {
    if k == 0 || k.unsigned_abs() as usize > field.max_mode() {
        return Err(DivCurlError::InvalidMode {
            k,
            reason: format!(
                "moment conditions exist for 1 ≤ |k| ≤ {}; k = 0 is the circulation/flux residual",
                field.max_mode()
            ),
        });
    }
    Ok(())
}

fn residual_parts(
    k: i32,
    w: &SpectralField,
    rho: &SpectralField,
    g: &BoundaryTrace,
    far: &FarField,
) -> Result<Complex64> {
    check_mode(k, w)?;
    w.check_compatible(rho)?;
    let sigma = k.signum() as f64;
    let src: Vec<Complex64> = w
        .mode(k)
        .iter()
        .zip(rho.mode(k))
        .map(|(a, b)| a + I * sigma * b)
        .collect();
    let (u_inf, v_inf) = far_field_combinations(far, k);
    let grow_inf = if sigma > 0.0 { u_inf } else { v_inf };
    Ok(growing_moment(w, &src, k) + g.g_phi(k) + I * sigma * g.g_r(k) - grow_inf)
}

/// Residual of the `k`-th moment condition, `k ≠ 0`.
pub fn moment_residual(k: i32, problem: &DiskProblem) -> Result<Complex64> {
    residual_parts(
        k,
        &problem.vorticity,
        &problem.divergence,
        &problem.boundary,
        &problem.far_field,
    )
}

/// The moment condition specialised to a no-slip trace `g = 0`.
pub fn no_slip_orthogonality(
    k: i32,
    w: &SpectralField,
    rho: &SpectralField,
    far: &FarField,
) -> Result<Complex64> {
    residual_parts(k, w, rho, &BoundaryTrace::zeros(0), far)
}

/// Circulation and flux parts `(∫ s w_0 ds + r0 g_{φ,0}, ∫ s ρ_0 ds + r0 g_{r,0})`.
fn mean_parts(w: &SpectralField, rho: &SpectralField, g: &BoundaryTrace) -> (Complex64, Complex64) {
    let grid = w.grid();
    let r0 = grid.r0();
    let times_s = |f: &[Complex64]| -> Vec<Complex64> {
        grid.nodes().iter().zip(f).map(|(&s, v)| v * s).collect()
    };
    let circ = grid.integrate(&times_s(w.mode(0))) + g.g_phi(0) * r0;
    let flux = grid.integrate(&times_s(rho.mode(0))) + g.g_r(0) * r0;
    (circ, flux)
}

/// `2π [(∫ s w_0 ds + r0 g_{φ,0}) + i (∫ s ρ_0 ds + r0 g_{r,0})]`, the total
/// circulation plus `i` times the total flux seen from infinity.
pub fn circulation_flux_residual(problem: &DiskProblem) -> Complex64 {
    let (circ, flux) = mean_parts(&problem.vorticity, &problem.divergence, &problem.boundary);
    (circ + I * flux) * (2.0 * PI)
}

/// Residuals of all conditions of a problem.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentReport {
    pub max_mode: usize,
    /// Residuals for `k = 1..=K`.
    pub positive: Vec<Complex64>,
    /// Residuals for `k = −1..=−K`.
    pub negative: Vec<Complex64>,
    pub circulation: Complex64,
    pub tolerance: f64,
    pub admissible: bool,
}

impl MomentReport {
    /// Residual at `k ≠ 0`.
    pub fn residual(&self, k: i32) -> Option<Complex64> {
        let idx = k.unsigned_abs() as usize;
        if k == 0 || idx > self.max_mode {
            return None;
        }
        Some(if k > 0 {
            self.positive[idx - 1]
        } else {
            self.negative[idx - 1]
        })
    }

    pub fn max_residual(&self) -> f64 {
        self.positive
            .iter()
            .chain(&self.negative)
            .map(|r| r.norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|conj(residual(k)) − residual(−k)|`; zero for real data.
    pub fn conjugate_asymmetry(&self) -> f64 {
        self.positive
            .iter()
            .zip(&self.negative)
            .map(|(p, n)| (p.conj() - n).norm())
            .fold(0.0, f64::max)
    }
}

/// Evaluates every condition with `1 ≤ |k| ≤ K`.
pub fn moment_report(problem: &DiskProblem, tolerance: f64) -> MomentReport {
    let k_max = problem.max_mode();
    let positive: Vec<Complex64> = (1..=k_max as i32)
        .map(|k| moment_residual(k, problem).expect("mode in range"))
        .collect();
    let negative: Vec<Complex64> = (1..=k_max as i32)
        .map(|k| moment_residual(-k, problem).expect("mode in range"))
        .collect();
    let circulation = circulation_flux_residual(problem);
    let worst = positive
        .iter()
        .chain(&negative)
        .map(|r| r.norm())
        .fold(0.0, f64::max);
    MomentReport {
        max_mode: k_max,
        positive,
        negative,
        circulation,
        tolerance,
        admissible: worst <= tolerance && circulation.norm() <= tolerance,
    }
}

/// Which scalar a correction was added to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorrectedField {
    Vorticity,
    Divergence,
}

/// `scale · bump(r) e^{ikφ}` added to mode `k` of one field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeCorrection {
    pub k: i32,
    pub field: CorrectedField,
    pub scale: Complex64,
}

/// Output of [`make_admissible`].
#[derive(Clone, Debug)]
pub struct AdmissibleData {
    pub vorticity: SpectralField,
    pub divergence: SpectralField,
    pub bump: Bump,
    pub corrections: Vec<ModeCorrection>,
}

impl AdmissibleData {
    /// Pointwise value of the vorticity and divergence corrections.
    pub fn correction_at(&self, r: f64, phi: f64) -> (f64, f64) {
        let b = self.bump.value(r);
        if b == 0.0 {
            return (0.0, 0.0);
        }
        let mut w = Complex64::new(0.0, 0.0);
        let mut rho = Complex64::new(0.0, 0.0);
        for c in &self.corrections {
            let term = c.scale * Complex64::from_polar(b, c.k as f64 * phi);
            match c.field {
                CorrectedField::Vorticity => w += term,
                CorrectedField::Divergence => rho += term,
            }
        }
        (w.re, rho.re)
    }
}

/// Adds bump-shaped corrections to the vorticity (and, for the flux, to the
/// mean divergence) so that every condition with `|k| ≤ k_c` holds.
///
/// Each mode is corrected by one closed-form scalar; modes whose residual is
/// exactly zero are left untouched. Pass `bump = None` for
/// [`Bump::default_for`] on the field grid.
pub fn make_admissible(
    w: &SpectralField,
    rho: &SpectralField,
    g: &BoundaryTrace,
    far: &FarField,
    k_c: usize,
    bump: Option<Bump>,
) -> Result<AdmissibleData> {
    w.check_compatible(rho)?;
    if k_c > w.max_mode() {
        return Err(DivCurlError::InvalidMode {
            k: k_c as i32,
            reason: format!("correction range exceeds the field range K = {}", w.max_mode()),
        });
    }
    let grid = w.grid();
    let bump = bump.unwrap_or_else(|| Bump::default_for(grid));
    if bump.inner < grid.r0() || bump.outer > grid.rmax() {
        return Err(DivCurlError::InvalidParameter(format!(
            "correction bump [{}, {}] leaves the grid [{}, {}]",
            bump.inner,
            bump.outer,
            grid.r0(),
            grid.rmax()
        )));
    }
    let profile = bump.sample(grid);

    let mut out = AdmissibleData {
        vorticity: w.clone(),
        divergence: rho.clone(),
        bump,
        corrections: Vec::new(),
    };

    let (circ, flux) = mean_parts(w, rho, g);
    let s_moment = grid.integrate_real(
        &grid
            .nodes()
            .iter()
            .map(|&s| s * bump.value(s))
            .collect::<Vec<_>>(),
    );
    if s_moment.abs() < f64::EPSILON {
        return Err(DivCurlError::DegenerateBump {
            k: 0,
            moment: s_moment,
        });
    }
    for (value, field) in [
        (circ, CorrectedField::Vorticity),
        (flux, CorrectedField::Divergence),
    ] {
        if value != Complex64::new(0.0, 0.0) {
            let scale = -value / s_moment;
            let target = match field {
                CorrectedField::Vorticity => &mut out.vorticity,
                CorrectedField::Divergence => &mut out.divergence,
            };
            for (v, b) in target.mode_mut(0).iter_mut().zip(&profile) {
                *v += scale * b;
            }
            out.corrections.push(ModeCorrection { k: 0, field, scale });
        }
    }

    for m in 1..=k_c as i32 {
        let moment = growing_moment(w, &profile, m).re;
        if moment.abs() < f64::EPSILON {
            return Err(DivCurlError::DegenerateBump { k: m, moment });
        }
        for k in [m, -m] {
            let residual = residual_parts(k, w, rho, g, far)?;
            if residual == Complex64::new(0.0, 0.0) {
                continue;
            }
            let scale = -residual / moment;
            for (v, b) in out.vorticity.mode_mut(k).iter_mut().zip(&profile) {
                *v += scale * b;
            }
            out.corrections.push(ModeCorrection {
                k,
                field: CorrectedField::Vorticity,
                scale,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::RadialGrid;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn step_field(grid: &RadialGrid, k: i32) -> SpectralField {
        let mut f = SpectralField::zeros(grid, 3);
        for (j, &s) in grid.nodes().iter().enumerate() {
            f.mode_mut(k)[j] = if s < 2.0 {
                c(1.0, 0.0)
            } else if s < 3.0 {
                c(-1.0, 0.0)
            } else {
                c(0.0, 0.0)
            };
        }
        f
    }

    #[test]
    fn zero_data_has_zero_residuals() {
        let grid = RadialGrid::geometric(1.0, 4.0, 64).unwrap();
        let p = DiskProblem::zeros(&grid, 3);
        for k in [-3, -1, 1, 2, 3] {
            assert_eq!(moment_residual(k, &p).unwrap(), c(0.0, 0.0));
        }
        assert_eq!(circulation_flux_residual(&p), c(0.0, 0.0));
        assert!(moment_report(&p, DEFAULT_TOLERANCE).admissible);
        assert!(moment_residual(0, &p).is_err());
        assert!(moment_residual(4, &p).is_err());
    }

    #[test]
    fn far_field_alone_violates_the_first_condition() {
        let grid = RadialGrid::geometric(1.0, 4.0, 64).unwrap();
        let v = 1.7;
        let mut p = DiskProblem::zeros(&grid, 3);
        p.far_field = FarField::new(v, 0.0);
        assert!((moment_residual(1, &p).unwrap() - c(0.0, -v)).norm() < 1e-15);
        assert!((moment_residual(-1, &p).unwrap() - c(0.0, v)).norm() < 1e-15);
        assert_eq!(moment_residual(2, &p).unwrap(), c(0.0, 0.0));

        p.boundary = p.far_field.slip_trace(3);
        let report = moment_report(&p, 1e-12);
        assert!(report.max_residual() < 1e-15);
        assert!(report.admissible);
    }

    #[test]
    fn circulation_examples() {
        let grid = RadialGrid::uniform(1.0, 3.0, 4000).unwrap();
        let mut p = DiskProblem::zeros(&grid, 1);
        for (j, &s) in grid.nodes().iter().enumerate() {
            // midpoint value at the jump keeps the trapezoid rule exact
            if (s - 2.0).abs() < 1e-9 {
                p.vorticity.mode_mut(0)[j] = c(0.5, 0.0);
            } else if s < 2.0 {
                p.vorticity.mode_mut(0)[j] = c(1.0, 0.0);
            }
        }
        let r = circulation_flux_residual(&p);
        assert!((r - c(3.0 * PI, 0.0)).norm() < 1e-12);
        p.boundary.set_g_phi(0, c(-1.5, 0.0)).unwrap();
        assert!(circulation_flux_residual(&p).norm() < 1e-12);
    }

    #[test]
    fn orthogonality_with_step_profiles() {
        let grid = RadialGrid::uniform(1.0, 3.0, 2000).unwrap();
        let z = SpectralField::zeros(&grid, 3);
        let far = FarField::default();
        let w1 = step_field(&grid, 1);
        assert!(no_slip_orthogonality(1, &w1, &z, &far).unwrap().norm() < 1e-3);
        let w2 = step_field(&grid, 2);
        let r = no_slip_orthogonality(2, &w2, &z, &far).unwrap();
        assert!((r - c((4.0f64 / 3.0).ln(), 0.0)).norm() < 1e-3);
    }

    #[test]
    fn projection_zeroes_all_residuals_and_is_idempotent() {
        let grid = RadialGrid::geometric(1.0, 4.0, 400).unwrap();
        let mut w = SpectralField::zeros(&grid, 4);
        let mut rho = SpectralField::zeros(&grid, 4);
        let b = Bump::new(1.5, 3.5).unwrap();
        for (j, &s) in grid.nodes().iter().enumerate() {
            let v = b.value(s);
            w.mode_mut(0)[j] = c(v, 0.0);
            rho.mode_mut(0)[j] = c(0.5 * v, 0.0);
            w.mode_mut(2)[j] = c(v, 2.0 * v);
            w.mode_mut(-2)[j] = c(v, -2.0 * v);
        }
        let mut g = BoundaryTrace::zeros(4);
        g.set_g_r(1, c(0.1, 0.3)).unwrap();
        g.set_g_r(-1, c(0.1, -0.3)).unwrap();
        let far = FarField::new(0.4, -0.2);
        let fixed = make_admissible(&w, &rho, &g, &far, 4, None).unwrap();
        let p = DiskProblem::new(fixed.vorticity.clone(), fixed.divergence.clone(), g.clone(), far)
            .unwrap();
        let report = moment_report(&p, 1e-12);
        assert!(report.admissible, "{report:?}");
        assert!(fixed.vorticity.conjugate_asymmetry() < 1e-15);

        let again = make_admissible(&fixed.vorticity, &fixed.divergence, &g, &far, 4, None).unwrap();
        for k in -4..=4 {
            for (a, b) in again.vorticity.mode(k).iter().zip(fixed.vorticity.mode(k)) {
                assert!((a - b).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn admissible_input_is_left_alone() {
        let grid = RadialGrid::geometric(1.0, 4.0, 64).unwrap();
        let w = SpectralField::zeros(&grid, 3);
        let fixed = make_admissible(&w, &w, &BoundaryTrace::zeros(3), &FarField::default(), 3, None)
            .unwrap();
        assert!(fixed.corrections.is_empty());
        assert_eq!(fixed.vorticity, w);
    }

    #[test]
    fn bump_outside_the_grid_is_rejected() {
        let grid = RadialGrid::geometric(1.0, 4.0, 64).unwrap();
        let w = SpectralField::zeros(&grid, 3);
        let bump = Bump::new(3.0, 5.0).unwrap();
        let err = make_admissible(&w, &w, &BoundaryTrace::zeros(3), &FarField::default(), 3, Some(bump));
        assert!(err.is_err());
    }
}
