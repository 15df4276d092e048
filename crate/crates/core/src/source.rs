//! Analytic, compactly supported test data: smooth radial bumps and finite
//! sums of bump-times-harmonic terms.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::compatibility::{make_admissible, CorrectedField};
use crate::conformal::ExteriorProblem;
use crate::disk::{DiskProblem, FarField};
use crate::error::{DivCurlError, Result};
use crate::grid::RadialGrid;
use crate::spectral::{BoundaryTrace, Point, SpectralField};

/// `exp(1 − 1/(1 − t²))` on `|t| < 1`, with `t` the position scaled to `[a, b]`.
///
/// Peaks at 1 in the middle of the support and is smooth everywhere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bump {
    pub inner: f64,
    pub outer: f64,
}

impl Bump {
    pub fn new(inner: f64, outer: f64) -> Result<Self> {
        if !(inner.is_finite() && outer.is_finite() && inner < outer) {
            return Err(DivCurlError::InvalidParameter(format!(
                "bump support [{inner}, {outer}] is empty"
            )));
        }
        Ok(Self { inner, outer })
    }

    /// Bump occupying the middle of `[r0, min(2 r0, R_max)]`.
    pub fn default_for(grid: &RadialGrid) -> Self {
        let r0 = grid.r0();
        let span = r0.min(grid.rmax() - r0);
        Self {
            inner: r0 + 0.1 * span,
            outer: r0 + 0.9 * span,
        }
    }

    pub fn value(&self, s: f64) -> f64 {
        let t = (2.0 * s - self.inner - self.outer) / (self.outer - self.inner);
        if t.abs() >= 1.0 {
            return 0.0;
        }
        (1.0 - 1.0 / (1.0 - t * t)).exp()
    }

    pub fn sample(&self, grid: &RadialGrid) -> Vec<Complex64> {
        grid.nodes()
            .iter()
            .map(|&s| Complex64::new(self.value(s), 0.0))
            .collect()
    }

    pub fn contains(&self, s: f64) -> bool {
        s > self.inner && s < self.outer
    }
}

/// One term `c b(r) e^{ikφ}` of a real field; `k > 0` terms include their
/// conjugate partner, so the field value is `2 Re(c e^{ikφ}) b(r)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModalTerm {
    pub k: u32,
    pub coefficient: Complex64,
    pub bump: Bump,
}

impl ModalTerm {
    pub fn value(&self, r: f64, phi: f64) -> f64 {
        let b = self.bump.value(r);
        if b == 0.0 {
            return 0.0;
        }
        if self.k == 0 {
            self.coefficient.re * b
        } else {
            let e = Complex64::from_polar(1.0, self.k as f64 * phi);
            2.0 * (self.coefficient * e).re * b
        }
    }
}

/// Real scalar field given as a finite sum of [`ModalTerm`]s.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ModalField {
    pub terms: Vec<ModalTerm>,
}

impl ModalField {
    pub fn new(terms: Vec<ModalTerm>) -> Self {
        Self { terms }
    }

    pub fn push(&mut self, k: u32, coefficient: Complex64, bump: Bump) {
        self.terms.push(ModalTerm {
            k,
            coefficient,
            bump,
        });
    }

    pub fn max_mode(&self) -> u32 {
        self.terms.iter().map(|t| t.k).max().unwrap_or(0)
    }

    pub fn value_polar(&self, r: f64, phi: f64) -> f64 {
        self.terms.iter().map(|t| t.value(r, phi)).sum()
    }

    pub fn value(&self, p: Point) -> f64 {
        self.value_polar(p[0].hypot(p[1]), p[1].atan2(p[0]))
    }

    /// Closed outer radius of the support.
    pub fn support_outer(&self) -> f64 {
        self.terms.iter().map(|t| t.bump.outer).fold(0.0, f64::max)
    }

    pub fn support_inner(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.bump.inner)
            .fold(f64::INFINITY, f64::min)
    }

    /// Exact Fourier profiles on `grid`; terms with `k > max_mode` are dropped.
    pub fn to_spectral(&self, grid: &RadialGrid, max_mode: usize) -> SpectralField {
        let mut field = SpectralField::zeros(grid, max_mode);
        for t in self.terms.iter().filter(|t| t.k as usize <= max_mode) {
            let k = t.k as i32;
            for (j, &s) in grid.nodes().iter().enumerate() {
                let b = t.bump.value(s);
                if k == 0 {
                    field.mode_mut(0)[j] += t.coefficient.re * b;
                } else {
                    field.mode_mut(k)[j] += t.coefficient * b;
                    field.mode_mut(-k)[j] += t.coefficient.conj() * b;
                }
            }
        }
        field
    }

    /// Random field with `terms` terms, modes up to `max_mode`, bumps inside
    /// `[lo, hi]` and coefficients of modulus at most `amplitude`.
    pub fn random<R: Rng>(
        rng: &mut R,
        terms: usize,
        max_mode: u32,
        lo: f64,
        hi: f64,
        amplitude: f64,
    ) -> Self {
        let mut field = Self::default();
        let width = hi - lo;
        for _ in 0..terms {
            let k = rng.random_range(0..=max_mode);
            let a = lo + rng.random_range(0.0..0.5) * width;
            let b = a + rng.random_range(0.3..=1.0) * (hi - a);
            let modulus = amplitude * rng.random_range(0.2..=1.0);
            let arg = rng.random_range(0.0..2.0 * PI);
            let mut c = Complex64::from_polar(modulus, arg);
            if k == 0 {
                c = Complex64::new(c.re, 0.0);
            }
            field.push(k, c, Bump { inner: a, outer: b });
        }
        field
    }
}

/// Random boundary trace with modes `|k| ≤ max_mode` and geometrically
/// decaying coefficients.
pub fn random_trace<R: Rng>(
    rng: &mut R,
    max_mode: usize,
    trace_modes: usize,
    amplitude: f64,
) -> BoundaryTrace {
    let mut g = BoundaryTrace::zeros(max_mode);
    for k in 0..=trace_modes.min(max_mode) as i32 {
        let scale = amplitude * 0.5f64.powi(k);
        let mut draw = || {
            Complex64::from_polar(
                scale * rng.random_range(0.0..=1.0),
                rng.random_range(0.0..2.0 * PI),
            )
        };
        let (gr, gp) = if k == 0 {
            (Complex64::new(draw().re, 0.0), Complex64::new(draw().re, 0.0))
        } else {
            (draw(), draw())
        };
        g.set_g_r(k, gr).unwrap();
        g.set_g_phi(k, gp).unwrap();
        if k > 0 {
            g.set_g_r(-k, gr.conj()).unwrap();
            g.set_g_phi(-k, gp.conj()).unwrap();
        }
    }
    g
}

pub fn random_far_field<R: Rng>(rng: &mut R, amplitude: f64) -> FarField {
    FarField::new(
        rng.random_range(-amplitude..=amplitude),
        rng.random_range(-amplitude..=amplitude),
    )
}

/// Ranges for [`SyntheticProblem::random`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SynthSettings {
    pub terms: usize,
    pub data_modes: u32,
    pub trace_modes: usize,
    /// Bumps are placed inside `[support.0, support.1]`.
    pub support: (f64, f64),
    pub amplitude: f64,
    pub far_field: f64,
    pub solenoidal: bool,
    pub no_slip: bool,
}

impl Default for SynthSettings {
    fn default() -> Self {
        Self {
            terms: 6,
            data_modes: 8,
            trace_modes: 4,
            support: (1.3, 2.6),
            amplitude: 1.0,
            far_field: 1.0,
            solenoidal: false,
            no_slip: false,
        }
    }
}

/// Problem with analytic data, usable both by the spectral solver and by
/// pointwise quadrature.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticProblem {
    pub vorticity: ModalField,
    pub divergence: ModalField,
    pub boundary: BoundaryTrace,
    pub far_field: FarField,
}

impl SyntheticProblem {
    pub fn random<R: Rng>(rng: &mut R, max_mode: usize, settings: &SynthSettings) -> Self {
        let (lo, hi) = settings.support;
        let modes = settings.data_modes.min(max_mode as u32);
        let vorticity = ModalField::random(rng, settings.terms, modes, lo, hi, settings.amplitude);
        let divergence = if settings.solenoidal {
            ModalField::default()
        } else {
            ModalField::random(rng, settings.terms, modes, lo, hi, settings.amplitude)
        };
        let boundary = if settings.no_slip {
            BoundaryTrace::zeros(max_mode)
        } else {
            random_trace(rng, max_mode, settings.trace_modes, settings.amplitude)
        };
        Self {
            vorticity,
            divergence,
            boundary,
            far_field: random_far_field(rng, settings.far_field),
        }
    }

    pub fn disk_problem(&self, grid: &RadialGrid, max_mode: usize) -> Result<DiskProblem> {
        DiskProblem::new(
            self.vorticity.to_spectral(grid, max_mode),
            self.divergence.to_spectral(grid, max_mode),
            self.boundary.clone(),
            self.far_field,
        )
    }

    /// Applies [`make_admissible`] on `grid` and folds the corrections into
    /// the analytic fields.
    pub fn admissible(
        &self,
        grid: &RadialGrid,
        max_mode: usize,
        k_c: usize,
        bump: Option<Bump>,
    ) -> Result<Self> {
        let p = self.disk_problem(grid, max_mode)?;
        let fixed = make_admissible(
            &p.vorticity,
            &p.divergence,
            &p.boundary,
            &p.far_field,
            k_c,
            bump,
        )?;
        let mut out = self.clone();
        for c in fixed.corrections.iter().filter(|c| c.k >= 0) {
            let target = match c.field {
                CorrectedField::Vorticity => &mut out.vorticity,
                CorrectedField::Divergence => &mut out.divergence,
            };
            target.push(c.k as u32, c.scale, fixed.bump);
        }
        Ok(out)
    }

    /// Pointwise form for quadrature and the mapped solver.
    pub fn pointwise(&self) -> ExteriorProblem {
        let w = self.vorticity.clone();
        let rho = self.divergence.clone();
        let g = self.boundary.clone();
        let lo = w.support_inner().min(rho.support_inner());
        let hi = w.support_outer().max(rho.support_outer());
        ExteriorProblem::new(
            move |y| w.value(y),
            move |y| rho.value(y),
            move |y| g.eval_cartesian(y[1].atan2(y[0])),
            self.far_field,
            if hi > lo { (lo, hi) } else { (0.0, 0.0) },
        )
    }
}
