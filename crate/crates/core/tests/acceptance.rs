//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use divcurl::compatibility::DEFAULT_TOLERANCE;
use divcurl::{
    biot_savart_disk, h1_deviation, h1_seminorm, h_half_boundary_norm, joukowski_map,
    joukowski_potential_flow, l2_weighted_norm, moment_report, moment_residual, neumann_defect,
    solve_disk, solve_exterior, solve_stream, velocity_from_stream, ConformalMap, DiskProblem,
    ExteriorProblem, FarField, OracleResolution, Point, PullbackParams, RadialGrid, SynthSettings,
    SyntheticProblem, WeightedNormParams,
};
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn cylinder_problem(grid: &RadialGrid, k: usize, slip: bool) -> DiskProblem {
    let mut p = DiskProblem::zeros(grid, k);
    p.far_field = FarField::new(1.0, 0.0);
    if slip {
        p.boundary = p.far_field.slip_trace(k);
    }
    p
}

fn cylinder_flow() -> Outcome {
    let grid = RadialGrid::geometric(1.0, 10.0, 2000).unwrap();
    let p = cylinder_problem(&grid, 4, true);
    let v = solve_disk(&p).unwrap();
    let mut rng = common::rng(1);
    let (mut worst, mut scale): (f64, f64) = (0.0, 0.0);
    for _ in 0..200 {
        let r = rng.random_range(1.0..10.0);
        let phi = rng.random_range(0.0..2.0 * PI);
        let (vr, vp) = v.polar_at(r, phi).unwrap();
        let er = phi.cos() * (1.0 - 1.0 / (r * r));
        let ep = -phi.sin() * (1.0 + 1.0 / (r * r));
        worst = worst.max((vr - er).abs()).max((vp - ep).abs());
        scale = scale.max(er.abs()).max(ep.abs());
    }
    let rel = worst / scale;
    let report = moment_report(&p, 1e-12);
    let residual = report.max_residual().max(report.circulation.norm());
    Outcome::new(
        rel <= 1e-10 && residual <= 1e-12,
        format!("relative error {rel:.2e}, largest residual {residual:.2e}"),
    )
}

fn impossibility_witness() -> Outcome {
    let grid = RadialGrid::geometric(1.0, 10.0, 2000).unwrap();
    let p = cylinder_problem(&grid, 4, false);
    let r1 = moment_residual(1, &p).unwrap();
    let err = (r1 - Complex64::new(0.0, -1.0)).norm();
    Outcome::new(err <= 1e-12, format!("k=1 residual {r1:.3e}, distance to -i {err:.2e}"))
}

fn random_points(rng: &mut impl Rng, n: usize, lo: f64, hi: f64) -> Vec<Point> {
    (0..n)
        .map(|_| {
            let r = rng.random_range(lo..hi);
            let phi = rng.random_range(0.0..2.0 * PI);
            [r * phi.cos(), r * phi.sin()]
        })
        .collect()
}

fn relative_gap(a: &[Point], b: &[Point]) -> f64 {
    let (mut worst, mut scale): (f64, f64) = (0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        worst = worst.max((x[0] - y[0]).hypot(x[1] - y[1]));
        scale = scale.max(y[0].hypot(y[1]));
    }
    worst / scale
}

fn oracle_equivalence() -> Outcome {
    let k = 12;
    let grid = RadialGrid::geometric(1.0, 4.0, 20_000).unwrap();
    let settings = SynthSettings {
        terms: 4,
        ..SynthSettings::default()
    };
    let reference = OracleResolution::default();
    let coarse = reference.coarsened();
    let mut rng = common::rng(3);
    let (mut worst_ref, mut worst_coarse): (f64, f64) = (0.0, 0.0);
    let mut converged = 0;
    for _ in 0..20 {
        let synth = SyntheticProblem::random(&mut rng, k, &settings)
            .admissible(&grid, k, 12, None)
            .unwrap();
        let p = synth.disk_problem(&grid, k).unwrap();
        if !moment_report(&p, DEFAULT_TOLERANCE).admissible {
            return Outcome::new(false, "projected data are not admissible");
        }
        let v = solve_disk(&p).unwrap();
        let pointwise = synth.pointwise();
        let points = random_points(&mut rng, 50, 1.1, 3.8);
        let spectral: Vec<Point> = points.iter().map(|&x| v.velocity_at(x).unwrap()).collect();
        let quad = |res: &OracleResolution| -> Vec<Point> {
            points
                .iter()
                .map(|&x| biot_savart_disk(x, &pointwise, 1.0, res).unwrap())
                .collect()
        };
        let e_ref = relative_gap(&spectral, &quad(&reference));
        let e_coarse = relative_gap(&spectral, &quad(&coarse));
        if e_ref < e_coarse {
            converged += 1;
        }
        worst_ref = worst_ref.max(e_ref);
        worst_coarse = worst_coarse.max(e_coarse);
    }
    Outcome::new(
        worst_ref <= 1e-6 && worst_ref < worst_coarse,
        format!(
            "max relative gap {worst_ref:.2e} at reference resolution, {worst_coarse:.2e} at half \
             resolution; gap shrank for {converged}/20 problems"
        ),
    )
}

fn pde_residual_order() -> Outcome {
    let k = 12;
    let settings = SynthSettings {
        terms: 4,
        support: (1.2, 3.5),
        ..SynthSettings::default()
    };
    let base = SyntheticProblem::random(&mut common::rng(4), k, &settings);
    let points = random_points(&mut common::rng(5), 40, 1.4, 3.3);
    let mut errors = Vec::new();
    for (m, h) in [(400, 0.01), (800, 0.005), (1600, 0.0025)] {
        let grid = RadialGrid::geometric(1.0, 4.0, m).unwrap();
        let synth = base.admissible(&grid, k, k, None).unwrap();
        let v = solve_disk(&synth.disk_problem(&grid, k).unwrap()).unwrap();
        let at = |x: Point| v.velocity_at(x).unwrap();
        let mut worst: f64 = 0.0;
        for &x in &points {
            let (e, w, n, s) = (
                at([x[0] + h, x[1]]),
                at([x[0] - h, x[1]]),
                at([x[0], x[1] + h]),
                at([x[0], x[1] - h]),
            );
            let div = (e[0] - w[0] + n[1] - s[1]) / (2.0 * h);
            let curl = (e[1] - w[1] - n[0] + s[0]) / (2.0 * h);
            worst = worst
                .max((div - synth.divergence.value(x)).abs())
                .max((curl - synth.vorticity.value(x)).abs());
        }
        errors.push(worst);
    }
    let orders: Vec<f64> = errors.windows(2).map(|e| (e[0] / e[1]).log2()).collect();
    let pass = orders.iter().all(|&o| o >= 1.9);
    Outcome::new(
        pass,
        format!(
            "max |div − ρ|, |curl − w| = {:.2e}, {:.2e}, {:.2e}; orders {:.2}, {:.2}",
            errors[0], errors[1], errors[2], orders[0], orders[1]
        ),
    )
}

fn conformal_path() -> Outcome {
    let far = FarField::new(1.0, 0.3);
    let ellipse = joukowski_map(0.5, 1.0).unwrap();
    let grid = RadialGrid::geometric(1.0, 20.0, 4000).unwrap();
    let params = PullbackParams::new(grid.clone(), 8);
    let slip = {
        let map = ellipse;
        ExteriorProblem::boundary_only(move |y| joukowski_potential_flow(&map, far, y), far)
    };
    let solution = solve_exterior(&slip, &ellipse, &params, DEFAULT_TOLERANCE).unwrap();
    let mut rng = common::rng(6);
    let points: Vec<Point> = (0..100)
        .map(|_| {
            let z = Complex64::from_polar(rng.random_range(1.05..10.0), rng.random_range(0.0..2.0 * PI));
            let p = ellipse.inverse(z);
            [p.re, p.im]
        })
        .collect();
    let computed: Vec<Point> = points.iter().map(|&p| solution.velocity_at(p).unwrap()).collect();
    let exact: Vec<Point> = points
        .iter()
        .map(|&p| joukowski_potential_flow(&ellipse, far, p))
        .collect();
    let ellipse_err = relative_gap(&computed, &exact);

    let k = 8;
    let synth = SyntheticProblem::random(&mut common::rng(7), k, &SynthSettings::default())
        .admissible(&grid, k, k, None)
        .unwrap();
    let direct = solve_disk(&synth.disk_problem(&grid, k).unwrap()).unwrap();
    let identity = joukowski_map(0.0, 1.0).unwrap();
    let mapped = solve_exterior(&synth.pointwise(), &identity, &PullbackParams::new(grid, k), DEFAULT_TOLERANCE)
        .unwrap();
    let probe = random_points(&mut rng, 100, 1.05, 10.0);
    let a: Vec<Point> = probe.iter().map(|&p| mapped.velocity_at(p).unwrap()).collect();
    let b: Vec<Point> = probe.iter().map(|&p| direct.velocity_at(p).unwrap()).collect();
    let identity_err = relative_gap(&a, &b);
    Outcome::new(
        ellipse_err <= 1e-6 && identity_err <= 1e-13,
        format!("ellipse relative error {ellipse_err:.2e}; identity map vs disk path {identity_err:.2e}"),
    )
}

struct Ratios {
    gradient: f64,
    deviation: f64,
}

fn estimate_ratios(synth: &SyntheticProblem, grid: &RadialGrid, k: usize) -> Ratios {
    let p = synth.disk_problem(grid, k).unwrap();
    let v = solve_disk(&p).unwrap();
    let g = h_half_boundary_norm(&p.boundary);
    let plain = WeightedNormParams::unweighted();
    let weighted = WeightedNormParams::new(2.0);
    let data = l2_weighted_norm(&p.divergence, plain) + l2_weighted_norm(&p.vorticity, plain) + g;
    let data_n =
        l2_weighted_norm(&p.divergence, weighted) + l2_weighted_norm(&p.vorticity, weighted) + g;
    Ratios {
        gradient: h1_seminorm(&v) / data,
        deviation: h1_deviation(&v) / data_n,
    }
}

fn estimate_properties() -> Outcome {
    let k = 10;
    let coarse = RadialGrid::geometric(1.0, 10.0, 1000).unwrap();
    let fine = coarse.refined(2).unwrap();
    let mut rng = common::rng(8);
    let settings = SynthSettings {
        support: (1.2, 4.0),
        ..SynthSettings::default()
    };
    let (mut max_c, mut max_f) = ([0.0f64; 2], [0.0f64; 2]);
    for _ in 0..50 {
        let synth = SyntheticProblem::random(&mut rng, k, &settings)
            .admissible(&coarse, k, k, None)
            .unwrap();
        for (grid, max) in [(&coarse, &mut max_c), (&fine, &mut max_f)] {
            let r = estimate_ratios(&synth, grid, k);
            if !(r.gradient.is_finite() && r.deviation.is_finite()) {
                return Outcome::new(false, "non-finite ratio");
            }
            max[0] = max[0].max(r.gradient);
            max[1] = max[1].max(r.deviation);
        }
    }
    let change = |i: usize| (max_f[i] - max_c[i]).abs() / max_c[i];
    Outcome::new(
        change(0) < 0.1 && change(1) < 0.1,
        format!(
            "max gradient ratio {:.4} → {:.4} ({:.2e} change); max H¹ ratio {:.4} → {:.4} ({:.2e} change)",
            max_c[0], max_f[0], change(0), max_c[1], max_f[1], change(1)
        ),
    )
}

fn stream_equivalence() -> Outcome {
    let k = 12;
    let grid = RadialGrid::geometric(1.0, 4.0, 50_000).unwrap();
    let settings = SynthSettings {
        terms: 4,
        support: (1.2, 3.0),
        solenoidal: true,
        no_slip: true,
        ..SynthSettings::default()
    };
    let mut rng = common::rng(9);
    let (mut worst_gap, mut worst_defect): (f64, f64) = (0.0, 0.0);
    for _ in 0..5 {
        let synth = SyntheticProblem::random(&mut rng, k, &settings)
            .admissible(&grid, k, k, None)
            .unwrap();
        let p = synth.disk_problem(&grid, k).unwrap();
        let direct = solve_disk(&p).unwrap();
        let psi = solve_stream(&p.vorticity, p.far_field).unwrap();
        let via_stream = velocity_from_stream(&psi);
        worst_gap = worst_gap.max(via_stream.max_difference(&direct) / direct.max_abs());
        worst_defect = worst_defect.max(neumann_defect(&psi));
    }
    let cylinder = cylinder_problem(&grid, 2, false);
    let psi = solve_stream(&cylinder.vorticity, cylinder.far_field).unwrap();
    let slip_defect = neumann_defect(&psi);
    let slip_err = (slip_defect - 2.0 * PI.sqrt()).abs();
    Outcome::new(
        worst_gap <= 1e-8 && worst_defect <= 1e-6 && slip_err <= 1e-8,
        format!(
            "stream vs direct {worst_gap:.2e} relative, admissible defect {worst_defect:.2e}, \
             slip defect {slip_defect:.10} (error {slip_err:.2e})"
        ),
    )
}

fn invariant_suite() -> Outcome {
    fn run<S: Strategy>(
        name: &str,
        strategy: S,
        check: impl Fn(S::Value) -> common::Check,
    ) -> Result<(), String> {
        let mut runner = TestRunner::new(Config {
            cases: 32,
            ..Config::default()
        });
        runner
            .run(&strategy, |v| check(v).map_err(TestCaseError::fail))
            .map_err(|e| format!("{name}: {e}"))
    }
    let results = [
        run("parseval", (any::<u64>(), 1usize..12), |(s, k)| common::parseval(s, k)),
        run("round trip", (any::<u64>(), 0usize..10, 0usize..7), |(s, k, e)| {
            common::round_trip(s, k, e)
        }),
        run("conjugate symmetry", any::<u64>(), common::conjugate_symmetry),
        run("linearity", (any::<u64>(), -3.0f64..3.0, -3.0f64..3.0), |(s, x, y)| {
            common::linearity(s, x, y)
        }),
        run("idempotence", (any::<u64>(), 1usize..7), |(s, k)| {
            common::admissible_idempotent(s, k)
        }),
        run("far-field decay", any::<u64>(), common::far_field_decay),
    ];
    let failures: Vec<String> = results.into_iter().filter_map(|r| r.err()).collect();
    if failures.is_empty() {
        Outcome::new(true, "parseval, round trip, conjugate symmetry, linearity, idempotence, decay: 32 cases each")
    } else {
        Outcome::new(false, failures.join("; "))
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("cylinder potential flow", cylinder_flow),
        ("impossibility witness", impossibility_witness),
        ("disk oracle equivalence", oracle_equivalence),
        ("PDE residual convergence", pde_residual_order),
        ("conformal path", conformal_path),
        ("estimate ratios", estimate_properties),
        ("stream function path", stream_equivalence),
        ("invariant suite", invariant_suite),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let label = format!("criterion {} ({name})", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| label.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = check();
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        println!(
            "{status} {label}: {} [{:.1} s]",
            outcome.detail,
            start.elapsed().as_secs_f64()
        );
        if !outcome.pass {
            failed += 1;
        }
    }
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
