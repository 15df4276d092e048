//! Problem assembly and the four subcommands.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use divcurl::compatibility::AdmissibleData;
use divcurl::{
    biot_savart_disk, biot_savart_omega, h1_deviation, h1_seminorm, h_half_boundary_norm,
    joukowski_map, joukowski_potential_flow, make_admissible, moment_report, neumann_defect,
    pullback_problem, pushforward_velocity, solve_disk, solve_stream, velocity_from_stream,
    BoundaryTrace, Bump, ConformalMap, DiskProblem, ExteriorProblem, FarField, Grading,
    Joukowski, ModalField, MomentReport, OracleResolution, Point, PullbackParams, RadialGrid,
    VelocitySolution, WeightedNormParams,
};
use num_complex::Complex64;

use crate::config::{
    BoundaryConfig, GradingConfig, Lattice, ProblemConfig, SolverKind, SourceConfig,
};
use crate::data::GriddedField;
use crate::error::CliError;
use crate::report::{
    write_points, CompatibilitySection, NormsSection, OracleSection, Report, SolveSection,
};

type Scalar = Arc<dyn Fn(Point) -> f64 + Send + Sync>;

/// Everything derived from a configuration before solving.
pub struct Prepared {
    pub map: Joukowski,
    /// Data in the physical domain, corrections included.
    pub exterior: ExteriorProblem,
    /// Pulled-back, possibly projected data on the disk.
    pub disk: DiskProblem,
    pub interpolation_error: BTreeMap<String, f64>,
}

fn to_c(p: Point) -> Complex64 {
    Complex64::new(p[0], p[1])
}

/// `f(Φ(y)) |Φ'(y)|²`: a disk-coordinate density carried to the domain.
fn carried(map: Joukowski, f: impl Fn(Point) -> f64 + Send + Sync + 'static) -> Scalar {
    Arc::new(move |y| {
        let p = to_c(y);
        let z = map.forward(p);
        let v = f([z.re, z.im]);
        if v == 0.0 {
            0.0
        } else {
            v * map.d_forward(p).norm_sqr()
        }
    })
}

fn source(
    name: &str,
    config: &SourceConfig,
    map: Joukowski,
    errors: &mut BTreeMap<String, f64>,
) -> Result<(Scalar, Option<(f64, f64)>), CliError> {
    Ok(match config {
        SourceConfig::Zero => (Arc::new(|_| 0.0), None),
        SourceConfig::Modes { terms } => {
            let mut field = ModalField::default();
            for t in terms {
                field.push(t.k, Complex64::new(t.re, t.im), Bump::new(t.inner, t.outer)?);
            }
            let support = (field.support_inner(), field.support_outer());
            (carried(map, move |z| field.value(z)), Some(support))
        }
        SourceConfig::File { path } => {
            let data = GriddedField::read(path)?;
            errors.insert(name.to_string(), data.interpolation_error());
            // |Φ(y)| ≤ |y| + c²/r0
            let reach = data.support_radius() + map.c() * map.c() / map.r0();
            let f: Scalar = Arc::new(move |y| data.value(y));
            (f, Some((map.r0(), reach.max(map.r0()))))
        }
    })
}

fn boundary(config: &BoundaryConfig, map: Joukowski, far: FarField, k: usize) -> Result<Arc<dyn Fn(Point) -> Point + Send + Sync>, CliError> {
    Ok(match config {
        BoundaryConfig::NoSlip => Arc::new(|_| [0.0, 0.0]),
        BoundaryConfig::Slip => Arc::new(move |y| joukowski_potential_flow(&map, far, y)),
        BoundaryConfig::Coefficients { g_r, g_phi } => {
            let mut g = BoundaryTrace::zeros(k);
            for (list, radial) in [(g_r, true), (g_phi, false)] {
                for c in list {
                    let value = Complex64::new(c.re, c.im);
                    let set = |g: &mut BoundaryTrace, k: i32, v: Complex64| {
                        if radial {
                            g.set_g_r(k, v)
                        } else {
                            g.set_g_phi(k, v)
                        }
                    };
                    set(&mut g, c.k, value)?;
                    let partner = if radial { g.g_r(-c.k) } else { g.g_phi(-c.k) };
                    if c.k != 0 && partner == Complex64::new(0.0, 0.0) {
                        set(&mut g, -c.k, value.conj())?;
                    }
                }
            }
            // the coefficients describe ĝ on |z| = r0; push it forward
            Arc::new(move |y| {
                let p = to_c(y);
                let z = map.forward(p);
                let v = g.eval_cartesian(z.arg());
                let f = map.d_forward(p) * Complex64::new(v[0], -v[1]);
                [f.re, -f.im]
            })
        }
    })
}

pub fn prepare(config: &ProblemConfig) -> Result<Prepared, CliError> {
    let r0 = config.domain.r0();
    let map = joukowski_map(config.domain.c(), r0)?;
    let grading = match config.grid.grading {
        GradingConfig::Uniform => Grading::Uniform,
        GradingConfig::Geometric => Grading::Geometric,
    };
    let grid = RadialGrid::new(grading, r0, config.grid.rmax, config.grid.nodes)?;
    let k = config.grid.modes;
    let far = FarField::new(config.far_field.v1, config.far_field.v2);

    let mut interpolation_error = BTreeMap::new();
    let (w, w_support) = source("vorticity", &config.vorticity, map, &mut interpolation_error)?;
    let (rho, rho_support) = source("divergence", &config.divergence, map, &mut interpolation_error)?;
    let g = boundary(&config.boundary, map, far, k)?;
    let mut support = [w_support, rho_support]
        .into_iter()
        .flatten()
        .fold(None, |acc: Option<(f64, f64)>, s| {
            Some(acc.map_or(s, |a| (a.0.min(s.0), a.1.max(s.1))))
        });

    let base = {
        let (w, rho, g) = (w.clone(), rho.clone(), g.clone());
        ExteriorProblem::new(
            move |y| w(y),
            move |y| rho(y),
            move |y| g(y),
            far,
            support.unwrap_or((0.0, 0.0)),
        )
    };
    let params = PullbackParams::new(grid.clone(), k);
    let pulled = pullback_problem(&base, &map, &params)?;
    let mut disk = pulled.disk_problem()?;

    let mut exterior = base;
    if config.solver.project > 0 {
        let fixed = make_admissible(
            &disk.vorticity,
            &disk.divergence,
            &disk.boundary,
            &disk.far_field,
            config.solver.project.min(k),
            None,
        )?;
        disk = DiskProblem::new(
            fixed.vorticity.clone(),
            fixed.divergence.clone(),
            disk.boundary.clone(),
            far,
        )?;
        let bump = fixed.bump;
        support = Some(support.map_or((bump.inner, bump.outer), |s| {
            (s.0.min(bump.inner), s.1.max(bump.outer))
        }));
        exterior = corrected(w, rho, g, far, support.unwrap(), map, Arc::new(fixed));
    }
    Ok(Prepared {
        map,
        exterior,
        disk,
        interpolation_error,
    })
}

fn corrected(
    w: Scalar,
    rho: Scalar,
    g: Arc<dyn Fn(Point) -> Point + Send + Sync>,
    far: FarField,
    support: (f64, f64),
    map: Joukowski,
    fixed: Arc<AdmissibleData>,
) -> ExteriorProblem {
    let part = |pick: fn((f64, f64)) -> f64| {
        let fixed = fixed.clone();
        carried(map, move |z| pick(fixed.correction_at(z[0].hypot(z[1]), z[1].atan2(z[0]))))
    };
    let (dw, drho) = (part(|c| c.0), part(|c| c.1));
    ExteriorProblem::new(
        move |y| w(y) + dw(y),
        move |y| rho(y) + drho(y),
        move |y| g(y),
        far,
        support,
    )
}

/// Sampling points of the output lattice, row-major.
pub fn lattice_points(lattice: &Lattice, map: &Joukowski) -> Vec<Point> {
    match *lattice {
        Lattice::Cartesian { x1, x2, n1, n2 } => {
            let step = |range: [f64; 2], n: usize, i: usize| {
                if n == 1 {
                    range[0]
                } else {
                    range[0] + (range[1] - range[0]) * i as f64 / (n - 1) as f64
                }
            };
            (0..n2)
                .flat_map(|j| (0..n1).map(move |i| [step(x1, n1, i), step(x2, n2, j)]))
                .collect()
        }
        Lattice::Polar { r, nr, nphi } => {
            let [lo, hi] = r.unwrap_or([map.r0(), map.r0()]);
            let mut out = Vec::with_capacity(nr * nphi);
            for i in 0..nr {
                let rad = if nr == 1 { lo } else { lo + (hi - lo) * i as f64 / (nr - 1) as f64 };
                for phi in divcurl::spectral::equispaced_angles(nphi) {
                    let p = map.inverse(Complex64::from_polar(rad, phi));
                    out.push([p.re, p.im]);
                }
            }
            out
        }
    }
}

fn compatibility(prepared: &Prepared, config: &ProblemConfig) -> (MomentReport, CompatibilitySection) {
    let report = moment_report(&prepared.disk, config.solver.tolerance);
    let section = CompatibilitySection::new(&report, config.solver.project);
    (report, section)
}

fn solve(prepared: &Prepared, config: &ProblemConfig) -> Result<(VelocitySolution, Option<f64>), CliError> {
    Ok(match config.solver.method {
        SolverKind::Direct => (solve_disk(&prepared.disk)?, None),
        SolverKind::Stream => {
            let psi = solve_stream(&prepared.disk.vorticity, prepared.disk.far_field)?;
            let defect = neumann_defect(&psi);
            (velocity_from_stream(&psi), Some(defect))
        }
    })
}

fn evaluate(v: &VelocitySolution, map: &Joukowski, points: &[Point]) -> Vec<Point> {
    pushforward_velocity(v, map, points)
        .into_iter()
        .map(|r| r.unwrap_or([f64::NAN, f64::NAN]))
        .collect()
}

fn norms(prepared: &Prepared, v: &VelocitySolution, weight: f64) -> NormsSection {
    use divcurl::l2_weighted_norm as l2;
    let plain = WeightedNormParams::unweighted();
    let weighted = WeightedNormParams::new(weight);
    let d = &prepared.disk;
    let g = h_half_boundary_norm(&d.boundary);
    let (w, rho) = (l2(&d.vorticity, plain), l2(&d.divergence, plain));
    let (wn, rhon) = (l2(&d.vorticity, weighted), l2(&d.divergence, weighted));
    let gradient = h1_seminorm(v);
    let deviation = h1_deviation(v);
    let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { f64::INFINITY };
    NormsSection {
        weight,
        gradient_l2: gradient,
        deviation_h1: deviation,
        boundary_h_half: g,
        vorticity_l2: w,
        divergence_l2: rho,
        vorticity_l2_weighted: wn,
        divergence_l2_weighted: rhon,
        gradient_ratio: ratio(gradient, w + rho + g),
        deviation_ratio: ratio(deviation, wn + rhon + g),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Check,
    Solve,
    Norms,
    Oracle,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Solve => "solve",
            Command::Norms => "norms",
            Command::Oracle => "oracle",
        }
    }
}

/// Runs one subcommand, writing `report.toml` and any CSV output to `out`.
/// The report is written before an inadmissible-data error is returned.
pub fn run(command: Command, config: &ProblemConfig, out: &Path) -> Result<Report, CliError> {
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let prepared = prepare(config)?;
    let (moments, compat) = compatibility(&prepared, config);
    let mut report = Report::new(command.name(), config, compat);
    report.interpolation_error = prepared.interpolation_error.clone();

    if command != Command::Check {
        let (v, defect) = solve(&prepared, config)?;
        let points = lattice_points(&config.output.lattice, &prepared.map);
        let values = evaluate(&v, &prepared.map, &points);
        if command == Command::Solve {
            write_points(&out.join("velocity.csv"), &points, &values)?;
        }
        report.solve = Some(SolveSection::new(config.solver.method, &points, &values, defect));
        if command == Command::Norms {
            report.norms = Some(norms(&prepared, &v, config.norms.weight));
        }
        if command == Command::Oracle {
            report.oracle = Some(oracle(&prepared, config, &v, out)?);
        }
    }
    report.write(&out.join("report.toml"))?;
    if config.solver.strict && !moments.admissible {
        return Err(CliError::Inadmissible(format!(
            "largest moment residual {:.3e}, circulation/flux residual {:.3e} (tolerance {:.1e})",
            moments.max_residual(),
            moments.circulation.norm(),
            config.solver.tolerance
        )));
    }
    Ok(report)
}

fn oracle(
    prepared: &Prepared,
    config: &ProblemConfig,
    v: &VelocitySolution,
    out: &Path,
) -> Result<OracleSection, CliError> {
    let o = &config.oracle;
    let res = OracleResolution {
        angles: o.angles,
        panels: o.panels,
        order: o.order,
        boundary_nodes: o.boundary_nodes,
    };
    let points = o.points.clone();
    let quad: Vec<Point> = points
        .iter()
        .map(|&p| {
            let value = if prepared.map.c() == 0.0 {
                biot_savart_disk(p, &prepared.exterior, prepared.map.r0(), &res)
            } else {
                biot_savart_omega(p, &prepared.exterior, &prepared.map, &res)
            };
            value.unwrap_or([f64::NAN, f64::NAN])
        })
        .collect();
    let spectral = evaluate(v, &prepared.map, &points);
    write_points(&out.join("oracle.csv"), &points, &quad)?;
    Ok(OracleSection::new(res, &quad, &spectral))
}
