//! Direct quadrature of the integral representation of the velocity.
//!
//! Outside the disk `|y| > r0`,
//!
//! ```text
//! v(x) = 1/2π ∫ [(x−y) ρ(y) + (x−y)^⊥ w(y)] / |x−y|² dy
//!      + 1/2π ∮ [(x−y)(g,n) + (x−y)^⊥(g,τ)] / |x−y|² dl + v∞
//! ```
//!
//! with `n` pointing into the fluid and `τ` counter-clockwise. In a mapped
//! domain the kernels become derivatives of `ln|Φ(x) − Φ(y)| / 2π` and the
//! whole integral is multiplied by `Φ'(x)` in complex form.
//!
//! The volume integral is taken in polar coordinates centred at `x`, where
//! the kernel singularity cancels against the area element; the remaining
//! integrand is smooth for smooth data. Nothing here touches the radial grid
//! or the Fourier machinery of the spectral solver.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::conformal::{
    complex_to_velocity, to_complex, to_point, velocity_to_complex, ConformalMap, ExteriorProblem,
};
use crate::error::{DivCurlError, Result};
use crate::spectral::{equispaced_angles, Point};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Quadrature resolution of the oracle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleResolution {
    /// Trapezoid angles around the evaluation point.
    pub angles: usize,
    /// Gauss–Legendre panels per radial interval.
    pub panels: usize,
    /// Nodes per panel.
    pub order: usize,
    /// Trapezoid nodes on the obstacle boundary.
    pub boundary_nodes: usize,
}

impl Default for OracleResolution {
    fn default() -> Self {
        Self {
            angles: 1024,
            panels: 32,
            order: 12,
            boundary_nodes: 1024,
        }
    }
}

impl OracleResolution {
    /// Halves every node count.
    pub fn coarsened(&self) -> Self {
        Self {
            angles: (self.angles / 2).max(8),
            panels: (self.panels / 2).max(1),
            order: self.order,
            boundary_nodes: (self.boundary_nodes / 2).max(8),
        }
    }

    /// Doubles every node count.
    pub fn refined(&self) -> Self {
        Self {
            angles: 2 * self.angles,
            panels: 2 * self.panels,
            order: self.order,
            boundary_nodes: 2 * self.boundary_nodes,
        }
    }
}

/// Parameter ranges of the ray `x + s e` inside the annulus `a ≤ |y| ≤ b`.
fn ray_intervals(x: Point, e: Point, a: f64, b: f64) -> Vec<(f64, f64)> {
    let beta = x[0] * e[0] + x[1] * e[1];
    let xx = x[0] * x[0] + x[1] * x[1];
    let chord = |radius: f64| {
        let disc = beta * beta - xx + radius * radius;
        (disc > 0.0).then(|| (-beta - disc.sqrt(), -beta + disc.sqrt()))
    };
    let Some((lo, hi)) = chord(b) else {
        return Vec::new();
    };
    let (lo, hi) = (lo.max(0.0), hi);
    if hi <= lo {
        return Vec::new();
    }
    match chord(a) {
        Some((c0, c1)) if c1 > lo && c0 < hi => {
            let mut out = Vec::new();
            if c0 > lo {
                out.push((lo, c0));
            }
            if c1 < hi {
                out.push((c1.max(lo), hi));
            }
            out
        }
        _ => vec![(lo, hi)],
    }
}

struct RadialRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    panels: usize,
}

impl RadialRule {
    fn new(res: &OracleResolution) -> Self {
        let (nodes, weights) = gauss_legendre(res.order);
        Self {
            nodes,
            weights,
            panels: res.panels,
        }
    }

    /// Calls `f(s, weight)` for every node on `[lo, hi]`.
    fn each(&self, lo: f64, hi: f64, mut f: impl FnMut(f64, f64)) {
        let width = (hi - lo) / self.panels as f64;
        for p in 0..self.panels {
            let mid = lo + (p as f64 + 0.5) * width;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                f(mid + 0.5 * width * x, 0.5 * width * w);
            }
        }
    }
}

/// Visits the quadrature nodes `(e, s, weight)` of `∫∫ F(x + s e_θ) ds dθ`
/// restricted to the annulus `inner ≤ |y| ≤ outer`.
///
/// From outside the annulus only the cone of directions that meets it is
/// integrated, with Gauss–Legendre panels in `θ`; otherwise the periodic
/// trapezoid rule is used.
fn volume_nodes(
    x: Point,
    inner: f64,
    outer: f64,
    res: &OracleResolution,
    mut f: impl FnMut(Point, f64, f64),
) {
    let rule = RadialRule::new(res);
    let rx = x[0].hypot(x[1]);
    let mut visit = |theta: f64, dtheta: f64| {
        let (sin, cos) = theta.sin_cos();
        for (lo, hi) in ray_intervals(x, [cos, sin], inner, outer) {
            rule.each(lo, hi, |s, w| f([cos, sin], s, w * dtheta));
        }
    };
    if rx > outer {
        let centre = (-x[1]).atan2(-x[0]);
        let half = (outer / rx).asin();
        let cone = RadialRule {
            nodes: rule.nodes.clone(),
            weights: rule.weights.clone(),
            panels: (res.angles / res.order).max(1),
        };
        cone.each(centre - half, centre + half, |theta, w| visit(theta, w));
    } else {
        let dtheta = 2.0 * PI / res.angles as f64;
        for theta in equispaced_angles(res.angles) {
            visit(theta, dtheta);
        }
    }
}

/// Velocity at `x` outside the disk of radius `r0`.
///
/// The problem's `support` gives the annulus outside which `ρ` and `w`
/// vanish; the boundary velocity is sampled on `|y| = r0`.
pub fn biot_savart_disk(
    x: Point,
    problem: &ExteriorProblem,
    r0: f64,
    res: &OracleResolution,
) -> Result<Point> {
    let rx = x[0].hypot(x[1]);
    if rx <= r0 * (1.0 + 1e-12) {
        return Err(DivCurlError::PointInSolid { x: x[0], y: x[1] });
    }
    let mut v = [0.0, 0.0];

    let (a, b) = problem.support;
    if b > a {
        volume_nodes(x, a.max(r0), b, res, |e, s, w| {
            let y = [x[0] + s * e[0], x[1] + s * e[1]];
            let rho = (problem.divergence)(y);
            let vort = (problem.vorticity)(y);
            // (x−y)/|x−y|² dy = −e ds dθ
            v[0] -= w * (rho * e[0] - vort * e[1]);
            v[1] -= w * (rho * e[1] + vort * e[0]);
        });
        v[0] /= 2.0 * PI;
        v[1] /= 2.0 * PI;
    }

    let n = res.boundary_nodes;
    let dl = r0 * 2.0 * PI / n as f64;
    for phi in equispaced_angles(n) {
        let (sin, cos) = phi.sin_cos();
        let y = [r0 * cos, r0 * sin];
        let g = (problem.boundary)(y);
        let gn = g[0] * cos + g[1] * sin;
        let gt = -g[0] * sin + g[1] * cos;
        let d = [x[0] - y[0], x[1] - y[1]];
        let scale = dl / (2.0 * PI * (d[0] * d[0] + d[1] * d[1]));
        v[0] += scale * (d[0] * gn - d[1] * gt);
        v[1] += scale * (d[1] * gn + d[0] * gt);
    }

    v[0] += problem.far_field.v1;
    v[1] += problem.far_field.v2;
    Ok(v)
}

/// Velocity at `p` in the mapped domain:
///
/// ```text
/// v1 − i v2 = Φ'(p) [ V̄ + 1/2π ∫ (ρ − i w)(y) / (Φ(p) − Φ(y)) dy
///                      + 1/2πi ∮ (g1 − i g2)(y) dy / (Φ(p) − Φ(y)) ]
/// ```
///
/// with `V̄ = v1∞ − i v2∞` and the boundary traversed counter-clockwise.
pub fn biot_savart_omega(
    p: Point,
    problem: &ExteriorProblem,
    map: &dyn ConformalMap,
    res: &OracleResolution,
) -> Result<Point> {
    let pc = to_complex(p);
    let zp = map.forward(pc);
    let r0 = map.r0();
    if zp.norm() <= r0 * (1.0 + 1e-12) {
        return Err(DivCurlError::PointInSolid { x: p[0], y: p[1] });
    }
    let mut acc = Complex64::new(0.0, 0.0);

    let (a, b) = problem.support;
    if b > a {
        // annulus in the physical plane covering the mapped support,
        // estimated from samples of the image circles
        let probe = equispaced_angles(1024);
        let outer = probe
            .iter()
            .map(|&t| map.inverse(Complex64::from_polar(b, t)).norm())
            .fold(0.0, f64::max);
        let inner = probe
            .iter()
            .map(|&t| map.inverse(Complex64::from_polar(a.max(r0), t)).norm())
            .fold(f64::INFINITY, f64::min);
        let mut volume = Complex64::new(0.0, 0.0);
        volume_nodes(p, inner, outer, res, |e, s, w| {
            let y = [p[0] + s * e[0], p[1] + s * e[1]];
            let zy = map.forward(to_complex(y));
            if zy.norm() <= r0 {
                return;
            }
            let src = Complex64::new((problem.divergence)(y), -(problem.vorticity)(y));
            if src != Complex64::new(0.0, 0.0) {
                volume += src * (w * s) / (zp - zy);
            }
        });
        acc += volume / (2.0 * PI);
    }

    let n = res.boundary_nodes;
    let dphi = 2.0 * PI / n as f64;
    let mut edge = Complex64::new(0.0, 0.0);
    for phi in equispaced_angles(n) {
        let z = Complex64::from_polar(r0, phi);
        let y = map.inverse(z);
        let dy = map.d_inverse(z) * Complex64::i() * z * dphi;
        let g = velocity_to_complex((problem.boundary)(to_point(y)));
        edge += g * dy / (zp - z);
    }
    acc += edge / Complex64::new(0.0, 2.0 * PI);

    let far = velocity_to_complex([problem.far_field.v1, problem.far_field.v2]);
    Ok(complex_to_velocity(map.d_forward(pc) * (far + acc)))
}

fn check_domain(x: Point, map: &dyn ConformalMap) -> Result<Complex64> {
    let z = map.forward(to_complex(x));
    if z.norm() < map.r0() * (1.0 - 1e-12) {
        return Err(DivCurlError::PointInSolid { x: x[0], y: x[1] });
    }
    Ok(z)
}

/// `ln|Φ(x) − Φ(y)| / 2π`.
pub fn green_function(x: Point, y: Point, map: &dyn ConformalMap) -> Result<f64> {
    let d = check_domain(x, map)? - check_domain(y, map)?;
    if d.norm() == 0.0 {
        return Err(DivCurlError::CoincidentPoints);
    }
    Ok(d.norm().ln() / (2.0 * PI))
}

/// Gradient of [`green_function`] in `x`.
pub fn green_gradient(x: Point, y: Point, map: &dyn ConformalMap) -> Result<Point> {
    let d = check_domain(x, map)? - check_domain(y, map)?;
    if d.norm() == 0.0 {
        return Err(DivCurlError::CoincidentPoints);
    }
    let u = map.d_forward(to_complex(x)) / d / (2.0 * PI);
    Ok([u.re, -u.im])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::joukowski_map;
    use crate::disk::FarField;
    use crate::source::Bump;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in [1, 2, 5, 12, 20] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            for deg in 0..2 * n {
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((got - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn ray_annulus_intersections() {
        // from the centre every ray crosses the annulus once
        assert_eq!(ray_intervals([0.0, 0.0], [1.0, 0.0], 1.0, 2.0), vec![(1.0, 2.0)]);
        // from inside the annulus, aiming across the hole
        let iv = ray_intervals([1.5, 0.0], [-1.0, 0.0], 1.0, 2.0);
        assert_eq!(iv.len(), 2);
        assert!((iv[0].0 - 0.0).abs() < 1e-15 && (iv[0].1 - 0.5).abs() < 1e-15);
        assert!((iv[1].0 - 2.5).abs() < 1e-15 && (iv[1].1 - 3.5).abs() < 1e-15);
        assert!(ray_intervals([5.0, 0.0], [1.0, 0.0], 1.0, 2.0).is_empty());
    }

    #[test]
    fn zero_data_gives_the_far_field() {
        let p = ExteriorProblem::boundary_only(|_| [0.0, 0.0], FarField::new(0.3, -2.0));
        let v = biot_savart_disk([2.0, 1.0], &p, 1.0, &OracleResolution::default()).unwrap();
        assert_eq!(v, [0.3, -2.0]);
        assert!(biot_savart_disk([0.5, 0.0], &p, 1.0, &OracleResolution::default()).is_err());
        assert!(biot_savart_disk([1.0, 0.0], &p, 1.0, &OracleResolution::default()).is_err());
    }

    #[test]
    fn distant_vortex_patch_looks_like_a_point_vortex() {
        let bump = Bump::new(1.2, 1.8).unwrap();
        let w = move |y: Point| bump.value(y[0].hypot(y[1]));
        let p = ExteriorProblem::new(w, |_| 0.0, |_| [0.0, 0.0], FarField::default(), (1.2, 1.8));
        let res = OracleResolution::default();
        // circulation by direct radial quadrature of the bump
        let (x, wts) = gauss_legendre(40);
        let gamma: f64 = x
            .iter()
            .zip(&wts)
            .map(|(x, wt)| {
                let s = 1.5 + 0.3 * x;
                2.0 * PI * s * bump.value(s) * 0.3 * wt
            })
            .sum();
        let x = [0.0, 180.0];
        let v = biot_savart_disk(x, &p, 1.0, &res).unwrap();
        let expected = gamma / (2.0 * PI * 180.0);
        assert!((v[0] + expected).abs() < 0.01 * expected, "{v:?} vs {expected}");
        assert!(v[1].abs() < 0.01 * expected);
    }

    #[test]
    fn identity_map_agrees_with_disk_kernels() {
        let bump = Bump::new(1.3, 2.4).unwrap();
        let w = move |y: Point| bump.value(y[0].hypot(y[1])) * (1.0 + 0.5 * y[0]);
        let rho = move |y: Point| bump.value(y[0].hypot(y[1])) * y[1];
        let g = |y: Point| [0.2 * y[1], 0.1 + 0.3 * y[0]];
        let p = ExteriorProblem::new(w, rho, g, FarField::new(0.5, 0.25), (1.3, 2.4));
        let id = joukowski_map(0.0, 1.0).unwrap();
        let res = OracleResolution::default();
        for x in [[1.8, 0.3], [0.2, -3.0], [-1.2, 1.1]] {
            let a = biot_savart_disk(x, &p, 1.0, &res).unwrap();
            let b = biot_savart_omega(x, &p, &id, &res).unwrap();
            assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12, "{a:?} {b:?}");
        }
    }

    #[test]
    fn green_function_values_and_symmetry() {
        let id = joukowski_map(0.0, 1.0).unwrap();
        assert!(green_function([2.0, 0.0], [3.0, 0.0], &id).unwrap().abs() < 1e-16);
        let e = std::f64::consts::E;
        let g = green_function([2.0, 0.0], [2.0 + e, 0.0], &id).unwrap();
        assert!((g - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert_eq!(
            green_function([2.0, 0.0], [2.0, 0.0], &id),
            Err(DivCurlError::CoincidentPoints)
        );
        let m = joukowski_map(0.5, 1.0).unwrap();
        let (x, y) = ([1.7, 0.4], [-0.3, 2.2]);
        assert_eq!(green_function(x, y, &m).unwrap(), green_function(y, x, &m).unwrap());
    }

    #[test]
    fn green_gradient_matches_finite_differences() {
        let m = joukowski_map(0.5, 1.0).unwrap();
        let (x, y) = ([1.7, 0.4], [-0.3, 2.2]);
        let grad = green_gradient(x, y, &m).unwrap();
        let h = 1e-5;
        for i in 0..2 {
            let (mut xp, mut xm) = (x, x);
            xp[i] += h;
            xm[i] -= h;
            let fd = (green_function(xp, y, &m).unwrap() - green_function(xm, y, &m).unwrap()) / (2.0 * h);
            assert!((fd - grad[i]).abs() < 1e-9);
        }
        // identity: the gradient is the source kernel (x − y)/(2π|x − y|²)
        let id = joukowski_map(0.0, 1.0).unwrap();
        let g = green_gradient(x, y, &id).unwrap();
        let d = [x[0] - y[0], x[1] - y[1]];
        let r2 = d[0] * d[0] + d[1] * d[1];
        assert!((g[0] - d[0] / (2.0 * PI * r2)).abs() < 1e-15);
        assert!((g[1] - d[1] / (2.0 * PI * r2)).abs() < 1e-15);
    }
}
