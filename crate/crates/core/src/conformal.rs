//! Exterior domains mapped onto the exterior of a disk.
//!
//! A conformal map `Φ: Ω → {|z| > r0}` with `Φ⁻¹(z) = z + O(1/z)` carries the
//! problem in `Ω` to a disk problem. Writing velocities as complex functions
//! `f = v1 − i v2`, the transformed velocity is `f̂(z) = (Φ⁻¹)'(z) f(Φ⁻¹(z))`,
//! which is `(DΦ⁻¹)ᵗ v` in matrix form. Divergence and vorticity pick up the
//! factor `|(Φ⁻¹)'|²`, the boundary trace the factor `(Φ⁻¹)'`, and the far
//! field is unchanged.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::compatibility::{moment_report, moment_residual, MomentReport};
use crate::disk::{solve_disk, DiskProblem, FarField, VelocitySolution};
use crate::error::{DivCurlError, Result};
use crate::grid::RadialGrid;
use crate::spectral::{
    analyze, equispaced_angles, polar_to_cartesian, BoundaryTrace, Point, PolarSamples,
    SpectralField,
};

pub(crate) fn to_complex(p: Point) -> Complex64 {
    Complex64::new(p[0], p[1])
}

pub(crate) fn to_point(z: Complex64) -> Point {
    [z.re, z.im]
}

/// Velocity `(v1, v2)` as `v1 − i v2`.
pub(crate) fn velocity_to_complex(v: Point) -> Complex64 {
    Complex64::new(v[0], -v[1])
}

pub(crate) fn complex_to_velocity(f: Complex64) -> Point {
    [f.re, -f.im]
}

/// Conformal map from an exterior domain `Ω` onto `|z| > r0`.
pub trait ConformalMap: fmt::Debug + Send + Sync {
    /// Radius of the image disk.
    fn r0(&self) -> f64;
    /// `Φ(p)` for `p ∈ Ω`.
    fn forward(&self, p: Complex64) -> Complex64;
    /// `Φ⁻¹(z)` for `|z| ≥ r0`.
    fn inverse(&self, z: Complex64) -> Complex64;
    /// `(Φ⁻¹)'(z)`.
    fn d_inverse(&self, z: Complex64) -> Complex64;

    /// `Φ'(p)`.
    fn d_forward(&self, p: Complex64) -> Complex64 {
        1.0 / self.d_inverse(self.forward(p))
    }

    /// Whether `p` lies in the closed fluid domain.
    fn contains(&self, p: Point) -> bool {
        self.forward(to_complex(p)).norm() >= self.r0() * (1.0 - 1e-12)
    }
}

/// `Φ⁻¹(z) = z + c²/z`: maps `|z| > r0` onto the exterior of an ellipse
/// with semi-axes `r0 ± c²/r0`, degenerating to the segment `[−2r0, 2r0]`
/// when `c = r0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Joukowski {
    c: f64,
    r0: f64,
}

impl Joukowski {
    pub fn c(&self) -> f64 {
        self.c
    }

    /// Semi-axes of the image of the circle `|z| = r`.
    pub fn semi_axes(&self, r: f64) -> (f64, f64) {
        let e = self.c * self.c / r;
        (r + e, r - e)
    }
}

pub fn joukowski_map(c: f64, r0: f64) -> Result<Joukowski> {
    if !(r0.is_finite() && r0 > 0.0) {
        return Err(DivCurlError::InvalidMap(format!("radius r0 = {r0} must be positive")));
    }
    if !(c.is_finite() && (0.0..=r0).contains(&c)) {
        return Err(DivCurlError::InvalidMap(format!(
            "parameter c = {c} must lie in [0, r0 = {r0}]; larger values fold the disk exterior"
        )));
    }
    Ok(Joukowski { c, r0 })
}

impl ConformalMap for Joukowski {
    fn r0(&self) -> f64 {
        self.r0
    }

    fn forward(&self, p: Complex64) -> Complex64 {
        if self.c == 0.0 {
            return p;
        }
        // product of principal roots: cut on [−2c, 2c], Φ(p) ~ p at infinity
        let two_c = 2.0 * self.c;
        (p + (p - two_c).sqrt() * (p + two_c).sqrt()) * 0.5
    }

    fn inverse(&self, z: Complex64) -> Complex64 {
        z + (self.c * self.c) / z
    }

    fn d_inverse(&self, z: Complex64) -> Complex64 {
        1.0 - (self.c * self.c) / (z * z)
    }
}

/// Checks `|Φ⁻¹(z) − z| = O(1/|z|)`, `|(Φ⁻¹)'(z) − 1| = O(1/|z|²)` and the
/// round trip `Φ(Φ⁻¹(z)) = z` on circles.
pub fn verify_asymptotics(map: &dyn ConformalMap) -> Result<()> {
    let r0 = map.r0();
    let probes = 64;
    let angles = equispaced_angles(probes);
    let mut first: Option<(f64, f64)> = None;
    for radius in [10.0 * r0, 100.0 * r0, 1000.0 * r0] {
        let mut shift: f64 = 0.0;
        let mut slope: f64 = 0.0;
        for &phi in &angles {
            let z = Complex64::from_polar(radius, phi);
            shift = shift.max((map.inverse(z) - z).norm() * radius);
            slope = slope.max((map.d_inverse(z) - 1.0).norm() * radius * radius);
        }
        if !(shift.is_finite() && slope.is_finite()) {
            return Err(DivCurlError::MapAsymptotics {
                radius,
                detail: "non-finite map values".into(),
            });
        }
        match first {
            None => first = Some((shift, slope)),
            Some((s0, d0)) => {
                // the scaled quantities must stay bounded as the radius grows
                let bound = |v0: f64| 2.0 * v0 + 1e-9 * radius;
                if shift > bound(s0) {
                    return Err(DivCurlError::MapAsymptotics {
                        radius,
                        detail: format!("|Φ⁻¹(z) − z|·|z| grew from {s0:.3e} to {shift:.3e}"),
                    });
                }
                if slope > bound(d0) {
                    return Err(DivCurlError::MapAsymptotics {
                        radius,
                        detail: format!("|(Φ⁻¹)'(z) − 1|·|z|² grew from {d0:.3e} to {slope:.3e}"),
                    });
                }
            }
        }
    }
    for radius in [r0 * 1.001, 2.0 * r0, 10.0 * r0] {
        for &phi in &angles {
            let z = Complex64::from_polar(radius, phi);
            let back = map.forward(map.inverse(z));
            if (back - z).norm() > 1e-10 * radius {
                return Err(DivCurlError::MapAsymptotics {
                    radius,
                    detail: format!("round trip Φ(Φ⁻¹(z)) missed z = {z} by {:.3e}", (back - z).norm()),
                });
            }
        }
    }
    Ok(())
}

pub type ScalarFn = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(Point) -> Point + Send + Sync>;

/// Pointwise problem data in a physical domain.
///
/// `boundary` is evaluated on the obstacle boundary only. The data must
/// vanish outside the mapped annulus `support.0 ≤ |Φ(y)| ≤ support.1`.
#[derive(Clone)]
pub struct ExteriorProblem {
    pub vorticity: ScalarFn,
    pub divergence: ScalarFn,
    pub boundary: VectorFn,
    pub far_field: FarField,
    pub support: (f64, f64),
}

impl fmt::Debug for ExteriorProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExteriorProblem")
            .field("far_field", &self.far_field)
            .field("support", &self.support)
            .finish_non_exhaustive()
    }
}

impl ExteriorProblem {
    pub fn new(
        vorticity: impl Fn(Point) -> f64 + Send + Sync + 'static,
        divergence: impl Fn(Point) -> f64 + Send + Sync + 'static,
        boundary: impl Fn(Point) -> Point + Send + Sync + 'static,
        far_field: FarField,
        support: (f64, f64),
    ) -> Self {
        Self {
            vorticity: Arc::new(vorticity),
            divergence: Arc::new(divergence),
            boundary: Arc::new(boundary),
            far_field,
            support,
        }
    }

    /// No sources, only a boundary velocity and a far field.
    pub fn boundary_only(
        boundary: impl Fn(Point) -> Point + Send + Sync + 'static,
        far_field: FarField,
    ) -> Self {
        Self::new(|_| 0.0, |_| 0.0, boundary, far_field, (0.0, 0.0))
    }
}

/// Discretisation used to carry an [`ExteriorProblem`] to the disk.
#[derive(Clone, Debug, PartialEq)]
pub struct PullbackParams {
    pub grid: RadialGrid,
    pub max_mode: usize,
    /// Angular samples per radius, at least `2K + 1`.
    pub angles: usize,
    /// Angular samples of the boundary trace.
    pub boundary_angles: usize,
}

impl PullbackParams {
    pub fn new(grid: RadialGrid, max_mode: usize) -> Self {
        let angles = (4 * max_mode + 4).max(16);
        Self {
            grid,
            max_mode,
            angles,
            boundary_angles: angles.max(256),
        }
    }
}

/// Disk data `q = |(Φ⁻¹)'|² w∘Φ⁻¹`, `rc = |(Φ⁻¹)'|² ρ∘Φ⁻¹` and the boundary
/// trace `ĝ` with `ĝ1 − iĝ2 = (Φ⁻¹)' (g1 − i g2)∘Φ⁻¹`.
#[derive(Clone, Debug)]
pub struct PulledBackProblem {
    pub q: SpectralField,
    pub rc: SpectralField,
    pub g_hat: BoundaryTrace,
    pub far_field: FarField,
}

impl PulledBackProblem {
    pub fn grid(&self) -> &RadialGrid {
        self.q.grid()
    }

    pub fn disk_problem(&self) -> Result<DiskProblem> {
        DiskProblem::new(
            self.q.clone(),
            self.rc.clone(),
            self.g_hat.clone(),
            self.far_field,
        )
    }
}

pub fn pullback_problem(
    problem: &ExteriorProblem,
    map: &dyn ConformalMap,
    params: &PullbackParams,
) -> Result<PulledBackProblem> {
    let grid = &params.grid;
    if (grid.r0() - map.r0()).abs() > 1e-14 * map.r0() {
        return Err(DivCurlError::InvalidParameter(format!(
            "grid starts at r = {} but the map image disk has radius {}",
            grid.r0(),
            map.r0()
        )));
    }
    let weighted = |f: &ScalarFn| {
        PolarSamples::from_fn(grid, params.angles, |x| {
            let z = to_complex(x);
            map.d_inverse(z).norm_sqr() * f(to_point(map.inverse(z)))
        })
    };
    let q = analyze(&weighted(&problem.vorticity), params.max_mode)?;
    let rc = analyze(&weighted(&problem.divergence), params.max_mode)?;

    let r0 = map.r0();
    let g_hat = BoundaryTrace::from_cartesian(params.max_mode, params.boundary_angles, |phi| {
        let z = to_complex(polar_to_cartesian(r0, phi));
        let g = (problem.boundary)(to_point(map.inverse(z)));
        complex_to_velocity(map.d_inverse(z) * velocity_to_complex(g))
    })?;
    Ok(PulledBackProblem {
        q,
        rc,
        g_hat,
        far_field: problem.far_field,
    })
}

/// Velocity in `Ω` at each point: `v1 − i v2 = Φ'(p) (v̂1 − i v̂2)(Φ(p))`.
pub fn pushforward_velocity(
    v_hat: &VelocitySolution,
    map: &dyn ConformalMap,
    points: &[Point],
) -> Vec<Result<Point>> {
    points
        .iter()
        .map(|&p| pushforward_point(v_hat, map, p))
        .collect()
}

fn pushforward_point(v_hat: &VelocitySolution, map: &dyn ConformalMap, p: Point) -> Result<Point> {
    let pc = to_complex(p);
    let z = map.forward(pc);
    if z.norm() < map.r0() * (1.0 - 1e-12) {
        return Err(DivCurlError::PointInSolid { x: p[0], y: p[1] });
    }
    let radius = z.norm().max(map.r0());
    let z = z * (radius / z.norm());
    let vh = v_hat.velocity_at(to_point(z)).ok_or_else(|| {
        DivCurlError::InvalidParameter(format!(
            "point ({}, {}) maps to |z| = {radius} beyond the grid",
            p[0], p[1]
        ))
    })?;
    Ok(complex_to_velocity(map.d_forward(pc) * velocity_to_complex(vh)))
}

/// Disk solution together with the map that carries it to `Ω`.
#[derive(Debug)]
pub struct ExteriorSolution<'m> {
    pub disk: VelocitySolution,
    pub report: MomentReport,
    map: &'m dyn ConformalMap,
}

impl ExteriorSolution<'_> {
    pub fn velocity_at(&self, p: Point) -> Result<Point> {
        pushforward_point(&self.disk, self.map, p)
    }

    pub fn map(&self) -> &dyn ConformalMap {
        self.map
    }
}

/// Pulls the problem back, solves on the disk and keeps the map for
/// evaluation in `Ω`. Inadmissible data produce a warning.
pub fn solve_exterior<'m>(
    problem: &ExteriorProblem,
    map: &'m dyn ConformalMap,
    params: &PullbackParams,
    tolerance: f64,
) -> Result<ExteriorSolution<'m>> {
    let pulled = pullback_problem(problem, map, params)?;
    let disk_problem = pulled.disk_problem()?;
    let report = moment_report(&disk_problem, tolerance);
    if !report.admissible {
        log::warn!(
            "mapped data violate the solvability conditions (max residual {:.3e}, circulation/flux {:.3e})",
            report.max_residual(),
            report.circulation.norm()
        );
    }
    Ok(ExteriorSolution {
        disk: solve_disk(&disk_problem)?,
        report,
        map,
    })
}

/// `k`-th moment residual of the pulled-back problem.
pub fn mapped_moment_residual(k: i32, pulled: &PulledBackProblem) -> Result<Complex64> {
    moment_residual(k, &pulled.disk_problem()?)
}

/// Quadrature settings of [`area_moment_residual`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AreaQuadrature {
    /// Half-width of the square box integrated over, centred at the origin.
    pub half_width: f64,
    /// Trapezoid nodes per side.
    pub nodes: usize,
    /// Boundary nodes.
    pub boundary_nodes: usize,
}

/// The `k`-th condition (`k ≥ 1`) in its area form in `Ω`:
///
/// ```text
/// ∫_Ω (w + iρ) Φ^{-k} dy + ∮_{∂Ω} (g1 − i g2) Φ^{-k} dy − 2πi (v1 − i v2)∞ δ_{k1}
/// ```
///
/// with the boundary traversed counter-clockwise. This equals
/// `2π / r0^{k-1}` times the disk-coordinate residual; it is evaluated with
/// a Cartesian trapezoid rule, independently of the radial grid.
pub fn area_moment_residual(
    k: i32,
    problem: &ExteriorProblem,
    map: &dyn ConformalMap,
    quad: AreaQuadrature,
) -> Result<Complex64> {
    if k < 1 {
        return Err(DivCurlError::InvalidMode {
            k,
            reason: "the area form is evaluated for k ≥ 1".into(),
        });
    }
    let n = quad.nodes;
    let h = 2.0 * quad.half_width / (n - 1) as f64;
    let mut area = Complex64::new(0.0, 0.0);
    for a in 0..n {
        let y1 = -quad.half_width + a as f64 * h;
        for b in 0..n {
            let y2 = -quad.half_width + b as f64 * h;
            let y = [y1, y2];
            let z = map.forward(to_complex(y));
            if z.norm() <= map.r0() {
                continue;
            }
            let f = Complex64::new((problem.vorticity)(y), (problem.divergence)(y));
            if f != Complex64::new(0.0, 0.0) {
                area += f * z.powi(-k);
            }
        }
    }
    area *= h * h;

    let r0 = map.r0();
    let mut edge = Complex64::new(0.0, 0.0);
    let dphi = 2.0 * PI / quad.boundary_nodes as f64;
    for phi in equispaced_angles(quad.boundary_nodes) {
        let z = Complex64::from_polar(r0, phi);
        let y = map.inverse(z);
        let dy = map.d_inverse(z) * Complex64::i() * z * dphi;
        let g = velocity_to_complex((problem.boundary)(to_point(y)));
        edge += g * z.powi(-k) * dy;
    }
    let far = velocity_to_complex([problem.far_field.v1, problem.far_field.v2]);
    let rhs = if k == 1 {
        Complex64::new(0.0, 2.0 * PI) * far
    } else {
        Complex64::new(0.0, 0.0)
    };
    Ok(area + edge - rhs)
}

/// Closed-form potential flow past the image of `|z| = r0` with zero
/// circulation: `v1 − i v2 = (V̄ − V r0²/Φ²) Φ'` with `V = v1 + i v2` at
/// infinity. Derivatives come from `Φ'(p) = Φ(p)/√(p² − 4c²)` for the
/// Joukowski family.
pub fn joukowski_potential_flow(map: &Joukowski, far: FarField, p: Point) -> Point {
    let pc = to_complex(p);
    let two_c = 2.0 * map.c();
    let z = map.forward(pc);
    let dz = if map.c() == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        z / ((pc - two_c).sqrt() * (pc + two_c).sqrt())
    };
    let v = Complex64::new(far.v1, far.v2);
    let r0 = map.r0();
    complex_to_velocity((v.conj() - v * (r0 * r0) / (z * z)) * dz)
}
