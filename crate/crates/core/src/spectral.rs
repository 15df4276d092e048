//! Angular Fourier representation of fields on polar grids.
//!
//! A field `f(r, φ)` is stored as its radial mode profiles
//! `f(r, φ) = Σ_{|k| ≤ K} f_k(r) e^{ikφ}` sampled at the nodes of a
//! [`RadialGrid`].

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{DivCurlError, Result};
use crate::grid::RadialGrid;

/// Cartesian point or vector.
pub type Point = [f64; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Equispaced angles `2πl/n`, `l = 0..n`.
pub fn equispaced_angles(n: usize) -> Vec<f64> {
    (0..n).map(|l| 2.0 * PI * l as f64 / n as f64).collect()
}

/// Samples on the tensor grid `nodes × angles`, stored node-major.
#[derive(Clone, Debug)]
pub struct PolarSamples {
    pub grid: RadialGrid,
    pub angles: usize,
    pub values: Vec<Complex64>,
}

impl PolarSamples {
    pub fn new(grid: RadialGrid, angles: usize, values: Vec<Complex64>) -> Result<Self> {
        let expected = grid.len() * angles;
        if values.len() != expected {
            return Err(DivCurlError::ShapeMismatch {
                expected,
                actual: values.len(),
            });
        }
        Ok(Self {
            grid,
            angles,
            values,
        })
    }

    /// Samples a real scalar function of the Cartesian position.
    pub fn from_fn(grid: &RadialGrid, angles: usize, f: impl Fn(Point) -> f64) -> Self {
        let phis = equispaced_angles(angles);
        let mut values = Vec::with_capacity(grid.len() * angles);
        for &s in grid.nodes() {
            for &phi in &phis {
                values.push(Complex64::new(f(polar_to_cartesian(s, phi)), 0.0));
            }
        }
        Self {
            grid: grid.clone(),
            angles,
            values,
        }
    }

    pub fn row(&self, node: usize) -> &[Complex64] {
        &self.values[node * self.angles..(node + 1) * self.angles]
    }
}

pub fn polar_to_cartesian(r: f64, phi: f64) -> Point {
    let (sin, cos) = phi.sin_cos();
    [r * cos, r * sin]
}

/// Mode profiles `f_k(s_j)` for `|k| ≤ K`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: RadialGrid,
    max_mode: usize,
    modes: Vec<Vec<Complex64>>,
}

impl SpectralField {
    pub fn zeros(grid: &RadialGrid, max_mode: usize) -> Self {
        Self {
            grid: grid.clone(),
            max_mode,
            modes: vec![vec![ZERO; grid.len()]; 2 * max_mode + 1],
        }
    }

    /// Builds a field from a profile function `(k, s) -> f_k(s)`.
    pub fn from_profiles(
        grid: &RadialGrid,
        max_mode: usize,
        profile: impl Fn(i32, f64) -> Complex64,
    ) -> Self {
        let k_max = max_mode as i32;
        let modes = (-k_max..=k_max)
            .map(|k| grid.nodes().iter().map(|&s| profile(k, s)).collect())
            .collect();
        Self {
            grid: grid.clone(),
            max_mode,
            modes,
        }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn max_mode(&self) -> usize {
        self.max_mode
    }

    pub fn mode_indices(&self) -> std::ops::RangeInclusive<i32> {
        -(self.max_mode as i32)..=self.max_mode as i32
    }

    fn slot(&self, k: i32) -> Option<usize> {
        (k.unsigned_abs() as usize <= self.max_mode).then(|| (k + self.max_mode as i32) as usize)
    }

    /// Profile of mode `k`; all zeros are implied for `|k| > K`.
    pub fn try_mode(&self, k: i32) -> Option<&[Complex64]> {
        self.slot(k).map(|i| self.modes[i].as_slice())
    }

    /// Profile of mode `k`.
    ///
    /// Panics if `|k|` exceeds the field's mode range.
    pub fn mode(&self, k: i32) -> &[Complex64] {
        self.try_mode(k)
            .unwrap_or_else(|| panic!("mode {k} outside ±{}", self.max_mode))
    }

    pub fn mode_mut(&mut self, k: i32) -> &mut [Complex64] {
        let i = self
            .slot(k)
            .unwrap_or_else(|| panic!("mode {k} outside ±{}", self.max_mode));
        &mut self.modes[i]
    }

    /// `self += scale * other`.
    pub fn add_scaled(&mut self, other: &SpectralField, scale: f64) -> Result<()> {
        self.check_compatible(other)?;
        for (a, b) in self.modes.iter_mut().zip(&other.modes) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y * scale;
            }
        }
        Ok(())
    }

    pub(crate) fn check_compatible(&self, other: &SpectralField) -> Result<()> {
        if self.max_mode != other.max_mode {
            return Err(DivCurlError::IncompatibleFields(format!(
                "mode ranges ±{} and ±{}",
                self.max_mode, other.max_mode
            )));
        }
        if self.grid != other.grid {
            return Err(DivCurlError::IncompatibleFields(
                "radial grids differ".to_string(),
            ));
        }
        Ok(())
    }

    /// Largest deviation from `f_{-k} = conj(f_k)`.
    pub fn conjugate_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 1..=self.max_mode as i32 {
            for (p, n) in self.mode(k).iter().zip(self.mode(-k)) {
                worst = worst.max((p - n.conj()).norm());
            }
        }
        for v in self.mode(0) {
            worst = worst.max(v.im.abs());
        }
        worst
    }

    /// Largest mode magnitude at the outer radius; nonzero values mean the
    /// data was truncated at `R_max`.
    pub fn tail_magnitude(&self) -> f64 {
        let last = self.grid.len() - 1;
        self.modes.iter().map(|m| m[last].norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.modes
            .iter()
            .flat_map(|m| m.iter())
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    /// Value at radius `r` and angle `phi`, interpolating profiles between nodes.
    pub fn value_at(&self, r: f64, phi: f64) -> Option<Complex64> {
        let mut acc = ZERO;
        for k in self.mode_indices() {
            acc += self.grid.interpolate(self.mode(k), r)? * Complex64::from_polar(1.0, k as f64 * phi);
        }
        Some(acc)
    }
}

/// Discrete angular Fourier coefficients of tensor-grid samples.
///
/// With `n ≥ 2K + 1` equispaced angles the coefficients of a band-limited
/// field are recovered exactly.
pub fn analyze(samples: &PolarSamples, max_mode: usize) -> Result<SpectralField> {
    let n = samples.angles;
    let required = 2 * max_mode + 1;
    if n < required {
        return Err(DivCurlError::Aliasing {
            angles: n,
            max_mode,
            required,
        });
    }
    let fft = FftPlanner::new().plan_fft_forward(n);
    let mut out = SpectralField::zeros(&samples.grid, max_mode);
    let mut buf = vec![ZERO; n];
    let scale = 1.0 / n as f64;
    for j in 0..samples.grid.len() {
        buf.copy_from_slice(samples.row(j));
        fft.process(&mut buf);
        for k in out.mode_indices() {
            let bin = k.rem_euclid(n as i32) as usize;
            out.mode_mut(k)[j] = buf[bin] * scale;
        }
    }
    Ok(out)
}

/// Pointwise sum `Σ_k f_k(s_j) e^{ikφ}` at every node and requested angle,
/// stored node-major.
pub fn synthesize(field: &SpectralField, angles: &[f64]) -> Vec<Complex64> {
    let phases: Vec<Vec<Complex64>> = angles
        .iter()
        .map(|&phi| {
            field
                .mode_indices()
                .map(|k| Complex64::from_polar(1.0, k as f64 * phi))
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(field.grid().len() * angles.len());
    for j in 0..field.grid().len() {
        for phase in &phases {
            let mut acc = ZERO;
            for (k, e) in field.mode_indices().zip(phase) {
                acc += field.mode(k)[j] * e;
            }
            out.push(acc);
        }
    }
    out
}

/// Fourier coefficients of a boundary velocity in the polar frame.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryTrace {
    max_mode: usize,
    g_r: Vec<Complex64>,
    g_phi: Vec<Complex64>,
}

impl BoundaryTrace {
    pub fn zeros(max_mode: usize) -> Self {
        Self {
            max_mode,
            g_r: vec![ZERO; 2 * max_mode + 1],
            g_phi: vec![ZERO; 2 * max_mode + 1],
        }
    }

    /// Coefficient vectors indexed by `k + K`.
    pub fn from_coefficients(
        max_mode: usize,
        g_r: Vec<Complex64>,
        g_phi: Vec<Complex64>,
    ) -> Result<Self> {
        let expected = 2 * max_mode + 1;
        for v in [&g_r, &g_phi] {
            if v.len() != expected {
                return Err(DivCurlError::ShapeMismatch {
                    expected,
                    actual: v.len(),
                });
            }
        }
        Ok(Self {
            max_mode,
            g_r,
            g_phi,
        })
    }

    /// Coefficients of real polar components sampled at equispaced angles.
    pub fn from_polar_samples(g_r: &[f64], g_phi: &[f64], max_mode: usize) -> Result<Self> {
        if g_r.len() != g_phi.len() {
            return Err(DivCurlError::ShapeMismatch {
                expected: g_r.len(),
                actual: g_phi.len(),
            });
        }
        let n = g_r.len();
        if n < 2 * max_mode + 1 {
            return Err(DivCurlError::Aliasing {
                angles: n,
                max_mode,
                required: 2 * max_mode + 1,
            });
        }
        let fft = FftPlanner::new().plan_fft_forward(n);
        let transform = |data: &[f64]| {
            let mut buf: Vec<Complex64> = data.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            fft.process(&mut buf);
            let k_max = max_mode as i32;
            (-k_max..=k_max)
                .map(|k| buf[k.rem_euclid(n as i32) as usize] / n as f64)
                .collect::<Vec<_>>()
        };
        Self::from_coefficients(max_mode, transform(g_r), transform(g_phi))
    }

    /// Coefficients of a Cartesian boundary velocity `angle -> (g1, g2)`,
    /// sampled at `n` equispaced angles.
    pub fn from_cartesian(max_mode: usize, n: usize, g: impl Fn(f64) -> Point) -> Result<Self> {
        let mut radial = Vec::with_capacity(n);
        let mut angular = Vec::with_capacity(n);
        for phi in equispaced_angles(n) {
            let [g1, g2] = g(phi);
            let (sin, cos) = phi.sin_cos();
            radial.push(g1 * cos + g2 * sin);
            angular.push(-g1 * sin + g2 * cos);
        }
        Self::from_polar_samples(&radial, &angular, max_mode)
    }

    pub fn max_mode(&self) -> usize {
        self.max_mode
    }

    fn slot(&self, k: i32) -> Option<usize> {
        (k.unsigned_abs() as usize <= self.max_mode).then(|| (k + self.max_mode as i32) as usize)
    }

    /// `g_{r,k}`; zero beyond the stored range.
    pub fn g_r(&self, k: i32) -> Complex64 {
        self.slot(k).map_or(ZERO, |i| self.g_r[i])
    }

    /// `g_{φ,k}`; zero beyond the stored range.
    pub fn g_phi(&self, k: i32) -> Complex64 {
        self.slot(k).map_or(ZERO, |i| self.g_phi[i])
    }

    pub fn set_g_r(&mut self, k: i32, value: Complex64) -> Result<()> {
        let i = self.slot(k).ok_or_else(|| out_of_range(k, self.max_mode))?;
        self.g_r[i] = value;
        Ok(())
    }

    pub fn set_g_phi(&mut self, k: i32, value: Complex64) -> Result<()> {
        let i = self.slot(k).ok_or_else(|| out_of_range(k, self.max_mode))?;
        self.g_phi[i] = value;
        Ok(())
    }

    pub fn scale(&mut self, factor: f64) {
        for v in self.g_r.iter_mut().chain(self.g_phi.iter_mut()) {
            *v *= factor;
        }
    }

    /// `(g_r, g_φ)` at angle `phi`.
    pub fn eval(&self, phi: f64) -> (Complex64, Complex64) {
        let k_max = self.max_mode as i32;
        let mut gr = ZERO;
        let mut gp = ZERO;
        for k in -k_max..=k_max {
            let e = Complex64::from_polar(1.0, k as f64 * phi);
            gr += self.g_r(k) * e;
            gp += self.g_phi(k) * e;
        }
        (gr, gp)
    }

    /// Cartesian boundary velocity at angle `phi` (real part).
    pub fn eval_cartesian(&self, phi: f64) -> Point {
        let (gr, gp) = self.eval(phi);
        let (sin, cos) = phi.sin_cos();
        [gr.re * cos - gp.re * sin, gr.re * sin + gp.re * cos]
    }

    pub fn conjugate_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..=self.max_mode as i32 {
            worst = worst
                .max((self.g_r(k) - self.g_r(-k).conj()).norm())
                .max((self.g_phi(k) - self.g_phi(-k).conj()).norm());
        }
        worst
    }
}

fn out_of_range(k: i32, max_mode: usize) -> DivCurlError {
    DivCurlError::InvalidMode {
        k,
        reason: format!("trace stores |k| ≤ {max_mode}"),
    }
}
