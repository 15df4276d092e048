//! Radial grids on `[r0, R_max]` and the quadrature, interpolation and
//! differentiation primitives defined on them.
//!
//! Every grid is uniform in a parameter `t`: `t = s` for [`Grading::Uniform`]
//! and `t = ln s` for [`Grading::Geometric`]. Quadrature is the composite
//! trapezoid rule in `t`, which keeps the rule second order on both gradings
//! and makes it spectrally accurate for integrands that vanish smoothly at
//! both ends of the range.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{DivCurlError, Result};

/// Smallest number of radial intervals accepted by [`RadialGrid::new`].
pub const MIN_INTERVALS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Grading {
    Uniform,
    /// Nodes `r0 * q^j` with a constant ratio `q > 1`.
    Geometric,
}

#[derive(Clone, Debug)]
pub struct RadialGrid {
    grading: Grading,
    nodes: Arc<[f64]>,
    step: f64,
}

impl PartialEq for RadialGrid {
    fn eq(&self, other: &Self) -> bool {
        self.grading == other.grading
            && (Arc::ptr_eq(&self.nodes, &other.nodes) || self.nodes == other.nodes)
    }
}

impl RadialGrid {
    pub fn new(grading: Grading, r0: f64, rmax: f64, intervals: usize) -> Result<Self> {
        if !(r0 > 0.0 && r0.is_finite()) {
            return Err(DivCurlError::InvalidGrid(format!(
                "inner radius must be positive, got {r0}"
            )));
        }
        if !(rmax > r0 && rmax.is_finite()) {
            return Err(DivCurlError::InvalidGrid(format!(
                "outer radius {rmax} must exceed inner radius {r0}"
            )));
        }
        if intervals < MIN_INTERVALS {
            return Err(DivCurlError::InvalidGrid(format!(
                "need at least {MIN_INTERVALS} intervals, got {intervals}"
            )));
        }
        let (t0, t1) = match grading {
            Grading::Uniform => (r0, rmax),
            Grading::Geometric => (r0.ln(), rmax.ln()),
        };
        let step = (t1 - t0) / intervals as f64;
        let mut nodes: Vec<f64> = (0..=intervals)
            .map(|j| {
                let t = t0 + step * j as f64;
                match grading {
                    Grading::Uniform => t,
                    Grading::Geometric => t.exp(),
                }
            })
            .collect();
        // pin the end points exactly
        nodes[0] = r0;
        nodes[intervals] = rmax;
        Ok(Self {
            grading,
            nodes: nodes.into(),
            step,
        })
    }

    pub fn uniform(r0: f64, rmax: f64, intervals: usize) -> Result<Self> {
        Self::new(Grading::Uniform, r0, rmax, intervals)
    }

    pub fn geometric(r0: f64, rmax: f64, intervals: usize) -> Result<Self> {
        Self::new(Grading::Geometric, r0, rmax, intervals)
    }

    /// Same span and grading with `factor` times as many intervals.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::new(
            self.grading,
            self.r0(),
            self.rmax(),
            self.intervals() * factor.max(1),
        )
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    /// Node ratio `q` of a geometric grid.
    pub fn ratio(&self) -> Option<f64> {
        match self.grading {
            Grading::Geometric => Some(self.step.exp()),
            Grading::Uniform => None,
        }
    }

    pub fn r0(&self) -> f64 {
        self.nodes[0]
    }

    pub fn rmax(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Number of nodes, `M + 1`.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Number of intervals `M`.
    pub fn intervals(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Spacing in the grid parameter `t`.
    pub fn step(&self) -> f64 {
        self.step
    }

    pub(crate) fn param(&self, s: f64) -> f64 {
        match self.grading {
            Grading::Uniform => s,
            Grading::Geometric => s.ln(),
        }
    }

    /// `ds/dt` at radius `s`.
    pub(crate) fn jacobian_at(&self, s: f64) -> f64 {
        match self.grading {
            Grading::Uniform => 1.0,
            Grading::Geometric => s,
        }
    }

    /// `d²s/dt²` at radius `s`.
    pub(crate) fn jacobian_slope_at(&self, s: f64) -> f64 {
        match self.grading {
            Grading::Uniform => 0.0,
            Grading::Geometric => s,
        }
    }

    /// Trapezoid weights for `∫_{r0}^{R_max} f(s) ds`.
    pub fn weights(&self) -> Vec<f64> {
        let last = self.intervals();
        self.nodes
            .iter()
            .enumerate()
            .map(|(j, &s)| {
                let end = if j == 0 || j == last { 0.5 } else { 1.0 };
                end * self.step * self.jacobian_at(s)
            })
            .collect()
    }

    /// `∫_{r0}^{R_max} f(s) ds` over the whole grid.
    pub fn integrate(&self, f: &[Complex64]) -> Complex64 {
        debug_assert_eq!(f.len(), self.len());
        self.weights().iter().zip(f).map(|(w, v)| v * *w).sum()
    }

    /// Real-valued counterpart of [`RadialGrid::integrate`].
    pub fn integrate_real(&self, f: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), self.len());
        self.weights().iter().zip(f).map(|(w, v)| v * w).sum()
    }

    /// Composite trapezoid approximation of `∫_a^b s^power f(s) ds`.
    ///
    /// End points that fall between nodes are handled by linear
    /// interpolation of the integrand in the grid parameter.
    pub fn radial_integral(
        &self,
        profile: &[Complex64],
        power: i32,
        a: f64,
        b: f64,
    ) -> Result<Complex64> {
        if profile.len() != self.len() {
            return Err(DivCurlError::ShapeMismatch {
                expected: self.len(),
                actual: profile.len(),
            });
        }
        let (lo, hi) = (self.r0(), self.rmax());
        let slack = 1e-12 * hi;
        if !(a >= lo - slack && b <= hi + slack && a <= hi + slack && b >= lo - slack) {
            return Err(DivCurlError::RangeOutsideGrid { a, b, lo, hi });
        }
        if a > b {
            return self.radial_integral(profile, power, b, a).map(|v| -v);
        }
        let a = a.clamp(lo, hi);
        let b = b.clamp(lo, hi);

        // integrand in the grid parameter
        let g = |j: usize| {
            let s = self.nodes[j];
            profile[j] * s.powi(power) * self.jacobian_at(s)
        };
        let ta = self.param(a);
        let tb = self.param(b);
        let (ja, fa) = self.locate_param(ta);
        let (jb, fb) = self.locate_param(tb);
        let lerp = |j: usize, frac: f64| {
            if frac == 0.0 {
                g(j)
            } else {
                g(j) * (1.0 - frac) + g(j + 1) * frac
            }
        };
        let ga = lerp(ja, fa);
        let gb = lerp(jb, fb);
        if ja == jb {
            return Ok((ga + gb) * (0.5 * (tb - ta)));
        }
        let h = self.step;
        // [a, node ja+1]
        let mut total = (ga + g(ja + 1)) * (0.5 * h * (1.0 - fa));
        for j in ja + 1..jb {
            total += (g(j) + g(j + 1)) * (0.5 * h);
        }
        // [node jb, b]
        total += (g(jb) + gb) * (0.5 * h * fb);
        Ok(total)
    }

    /// Panel index and fractional position of parameter value `t`.
    fn locate_param(&self, t: f64) -> (usize, f64) {
        let t0 = self.param(self.r0());
        let x = ((t - t0) / self.step).max(0.0);
        let last = self.intervals();
        let j = (x.floor() as usize).min(last - 1);
        let frac = (x - j as f64).clamp(0.0, 1.0);
        if frac >= 1.0 - 1e-14 && j + 1 == last {
            return (j, 1.0);
        }
        (j, frac)
    }

    /// Panel index and fractional position of radius `r`; `None` outside the grid.
    pub fn locate(&self, r: f64) -> Option<(usize, f64)> {
        let slack = 1e-12 * self.rmax();
        if r < self.r0() - slack || r > self.rmax() + slack {
            return None;
        }
        Some(self.locate_param(self.param(r.clamp(self.r0(), self.rmax()))))
    }

    /// Four-point Lagrange interpolation of a nodal profile in the grid
    /// parameter. Returns `None` for radii outside the grid.
    pub fn interpolate(&self, profile: &[Complex64], r: f64) -> Option<Complex64> {
        let (j, frac) = self.locate(r)?;
        let last = self.intervals();
        // stencil start so that the stencil stays inside the grid
        let start = j.saturating_sub(1).min(last - 3);
        let x = (j - start) as f64 + frac;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..4 {
            let mut w = 1.0;
            for m in 0..4 {
                if m != i {
                    w *= (x - m as f64) / (i as f64 - m as f64);
                }
            }
            acc += profile[start + i] * w;
        }
        Some(acc)
    }

    /// Second-order finite-difference `d/ds` of a nodal profile.
    pub fn derivative(&self, profile: &[Complex64]) -> Vec<Complex64> {
        let n = self.len();
        let h = self.step;
        let mut out = Vec::with_capacity(n);
        for j in 0..n {
            let dt = if j == 0 {
                (profile[0] * -3.0 + profile[1] * 4.0 - profile[2]) / (2.0 * h)
            } else if j == n - 1 {
                (profile[n - 1] * 3.0 - profile[n - 2] * 4.0 + profile[n - 3]) / (2.0 * h)
            } else {
                (profile[j + 1] - profile[j - 1]) / (2.0 * h)
            };
            out.push(dt / self.jacobian_at(self.nodes[j]));
        }
        out
    }
}
