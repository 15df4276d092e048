//! Invariant checks shared by the property tests and the acceptance suite.
//! Each check draws its data from a seed and returns a message on failure.

#![allow(dead_code)]

use divcurl::compatibility::DEFAULT_TOLERANCE;
use divcurl::{
    analyze, make_admissible, moment_report, moment_residual, solve_disk, synthesize,
    DiskProblem, FarField, PolarSamples, RadialGrid, SynthSettings, SyntheticProblem,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<(), String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_grid() -> RadialGrid {
    RadialGrid::geometric(1.0, 8.0, 400).unwrap()
}

pub fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond { Ok(()) } else { Err(msg()) }
}

fn random_samples(seed: u64, grid: &RadialGrid, angles: usize) -> PolarSamples {
    let mut r = rng(seed);
    let values = (0..grid.len() * angles)
        .map(|_| Complex64::new(r.random_range(-1.0..1.0), 0.0))
        .collect();
    PolarSamples::new(grid.clone(), angles, values).unwrap()
}

/// `Σ_k |f_k|² = mean |f|²` when `2K + 1` angles are used.
pub fn parseval(seed: u64, max_mode: usize) -> Check {
    let grid = RadialGrid::uniform(1.0, 2.0, 8).unwrap();
    let n = 2 * max_mode + 1;
    let samples = random_samples(seed, &grid, n);
    let field = analyze(&samples, max_mode).map_err(|e| e.to_string())?;
    for j in 0..grid.len() {
        let physical: f64 = samples.row(j).iter().map(|v| v.norm_sqr()).sum::<f64>() / n as f64;
        let spectral: f64 = field.mode_indices().map(|k| field.mode(k)[j].norm_sqr()).sum();
        ensure((physical - spectral).abs() <= 1e-12 * physical.max(1.0), || {
            format!("node {j}: {physical} vs {spectral}")
        })?;
    }
    Ok(())
}

/// Synthesis inverts analysis on `2K + 1` angles, and analysis recovers a
/// band-limited field from any `n ≥ 2K + 1` angles.
pub fn round_trip(seed: u64, max_mode: usize, extra: usize) -> Check {
    let grid = RadialGrid::uniform(1.0, 2.0, 8).unwrap();
    let n = 2 * max_mode + 1;
    let samples = random_samples(seed, &grid, n);
    let field = analyze(&samples, max_mode).map_err(|e| e.to_string())?;
    let back = synthesize(&field, &divcurl::spectral::equispaced_angles(n));
    let err = back
        .iter()
        .zip(&samples.values)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    ensure(err < 1e-12, || format!("synthesis round trip error {err}"))?;

    let wide = n + extra;
    let values = synthesize(&field, &divcurl::spectral::equispaced_angles(wide));
    let again = analyze(&PolarSamples::new(grid.clone(), wide, values).unwrap(), max_mode)
        .map_err(|e| e.to_string())?;
    let mut diff = field.clone();
    diff.add_scaled(&again, -1.0).unwrap();
    let err = diff.max_abs();
    ensure(err < 1e-12, || format!("analysis round trip error {err}"))
}

fn problem(seed: u64, grid: &RadialGrid, max_mode: usize, settings: &SynthSettings) -> DiskProblem {
    SyntheticProblem::random(&mut rng(seed), max_mode, settings)
        .disk_problem(grid, max_mode)
        .unwrap()
}

fn property_settings() -> SynthSettings {
    SynthSettings {
        terms: 4,
        data_modes: 5,
        trace_modes: 3,
        support: (1.2, 3.0),
        ..SynthSettings::default()
    }
}

/// Real data give `f_{-k} = conj(f_k)` for the transform, the velocity and
/// the moment residuals.
pub fn conjugate_symmetry(seed: u64) -> Check {
    let grid = small_grid();
    let samples = random_samples(seed, &RadialGrid::uniform(1.0, 2.0, 8).unwrap(), 17);
    let field = analyze(&samples, 8).map_err(|e| e.to_string())?;
    ensure(field.conjugate_asymmetry() < 1e-14, || {
        format!("transform asymmetry {}", field.conjugate_asymmetry())
    })?;

    let p = problem(seed, &grid, 6, &property_settings());
    let v = solve_disk(&p).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for k in 1..=6 {
        let (a, b) = (v.mode(k), v.mode(-k));
        for j in 0..grid.len() {
            worst = worst
                .max((a.v_r[j] - b.v_r[j].conj()).norm())
                .max((a.v_phi[j] - b.v_phi[j].conj()).norm());
        }
    }
    ensure(worst < 1e-12, || format!("velocity asymmetry {worst}"))?;
    let report = moment_report(&p, DEFAULT_TOLERANCE);
    ensure(report.conjugate_asymmetry() < 1e-12, || {
        format!("residual asymmetry {}", report.conjugate_asymmetry())
    })
}

fn combine(a: &DiskProblem, b: &DiskProblem, x: f64, y: f64) -> DiskProblem {
    let mut w = a.vorticity.clone();
    w.add_scaled(&a.vorticity, x - 1.0).unwrap();
    w.add_scaled(&b.vorticity, y).unwrap();
    let mut rho = a.divergence.clone();
    rho.add_scaled(&a.divergence, x - 1.0).unwrap();
    rho.add_scaled(&b.divergence, y).unwrap();
    let mut g = a.boundary.clone();
    let mut gb = b.boundary.clone();
    g.scale(x);
    gb.scale(y);
    for k in -(g.max_mode() as i32)..=g.max_mode() as i32 {
        g.set_g_r(k, g.g_r(k) + gb.g_r(k)).unwrap();
        g.set_g_phi(k, g.g_phi(k) + gb.g_phi(k)).unwrap();
    }
    let far = FarField::new(
        x * a.far_field.v1 + y * b.far_field.v1,
        x * a.far_field.v2 + y * b.far_field.v2,
    );
    DiskProblem::new(w, rho, g, far).unwrap()
}

/// The solution and the moment residuals depend linearly on the data.
pub fn linearity(seed: u64, x: f64, y: f64) -> Check {
    let grid = small_grid();
    let k = 6;
    let a = problem(seed, &grid, k, &property_settings());
    let b = problem(seed.wrapping_add(1), &grid, k, &property_settings());
    let ab = combine(&a, &b, x, y);
    let (va, vb, vab) = (
        solve_disk(&a).unwrap(),
        solve_disk(&b).unwrap(),
        solve_disk(&ab).unwrap(),
    );
    let scale = 1.0 + x.abs() * va.max_abs() + y.abs() * vb.max_abs();
    let mut worst: f64 = 0.0;
    for m in -(k as i32)..=k as i32 {
        let (ma, mb, mab) = (va.mode(m), vb.mode(m), vab.mode(m));
        for j in 0..grid.len() {
            worst = worst
                .max((mab.v_r[j] - ma.v_r[j] * x - mb.v_r[j] * y).norm())
                .max((mab.v_phi[j] - ma.v_phi[j] * x - mb.v_phi[j] * y).norm());
        }
    }
    ensure(worst < 1e-12 * scale, || format!("solution not linear: {worst}"))?;
    for m in (1..=k as i32).flat_map(|m| [m, -m]) {
        let lhs = moment_residual(m, &ab).unwrap();
        let rhs = moment_residual(m, &a).unwrap() * x + moment_residual(m, &b).unwrap() * y;
        ensure((lhs - rhs).norm() < 1e-12 * scale, || {
            format!("residual {m} not linear: {lhs} vs {rhs}")
        })?;
    }
    Ok(())
}

/// Projection clears every residual up to `K_c` and a second projection
/// changes nothing.
pub fn admissible_idempotent(seed: u64, k_c: usize) -> Check {
    let grid = small_grid();
    let p = problem(seed, &grid, 6, &property_settings());
    let once = make_admissible(&p.vorticity, &p.divergence, &p.boundary, &p.far_field, k_c, None)
        .map_err(|e| e.to_string())?;
    let fixed = DiskProblem::new(
        once.vorticity.clone(),
        once.divergence.clone(),
        p.boundary.clone(),
        p.far_field,
    )
    .unwrap();
    let report = moment_report(&fixed, 1e-10);
    let worst = (1..=k_c as i32)
        .flat_map(|k| [k, -k])
        .map(|k| report.residual(k).unwrap().norm())
        .fold(report.circulation.norm(), f64::max);
    ensure(worst < 1e-10, || format!("residual {worst} after projection"))?;

    let twice = make_admissible(
        &once.vorticity,
        &once.divergence,
        &p.boundary,
        &p.far_field,
        k_c,
        None,
    )
    .map_err(|e| e.to_string())?;
    let mut dw = twice.vorticity.clone();
    dw.add_scaled(&once.vorticity, -1.0).unwrap();
    let mut drho = twice.divergence.clone();
    drho.add_scaled(&once.divergence, -1.0).unwrap();
    let change = dw.max_abs().max(drho.max_abs());
    ensure(change < 1e-10 * (1.0 + once.vorticity.max_abs()), || {
        format!("second projection moved the data by {change}")
    })
}

/// With zero circulation and flux, `|v_k − v∞_k| r²` does not grow beyond
/// the support of the data.
pub fn far_field_decay(seed: u64) -> Check {
    let grid = small_grid();
    let k = 6;
    let settings = property_settings();
    let synth = SyntheticProblem::random(&mut rng(seed), k, &settings)
        .admissible(&grid, k, k, None)
        .map_err(|e| e.to_string())?;
    let p = synth.disk_problem(&grid, k).unwrap();
    let v = solve_disk(&p).unwrap();
    let outer = settings.support.1;
    let scale = v.max_abs();
    for m in -(k as i32)..=k as i32 {
        let (fr, fp) = p.far_field.coefficients(m);
        let mode = v.mode(m);
        let weighted: Vec<(f64, f64)> = grid
            .nodes()
            .iter()
            .enumerate()
            .filter(|(_, &s)| s > outer)
            .map(|(j, &s)| {
                let dev = (mode.v_r[j] - fr).norm().hypot((mode.v_phi[j] - fp).norm());
                (s, dev * s * s)
            })
            .collect();
        for w in weighted.windows(2) {
            let ((_, a), (s, b)) = (w[0], w[1]);
            ensure(b <= a * (1.0 + 1e-9) + 1e-12 * scale, || {
                format!("mode {m}: r² |v − v∞| grows at r = {s} ({a} → {b})")
            })?;
        }
    }
    Ok(())
}
