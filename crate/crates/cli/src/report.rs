//! Report and field-dump writers.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use divcurl::{MomentReport, OracleResolution, Point};
use serde::Serialize;

use crate::config::{ProblemConfig, SolverKind};
use crate::error::CliError;

#[derive(Debug, Serialize)]
pub struct ModeResidual {
    pub k: i32,
    /// `[re, im]`.
    pub residual: [f64; 2],
    pub magnitude: f64,
}

#[derive(Debug, Serialize)]
pub struct CompatibilitySection {
    pub admissible: bool,
    pub tolerance: f64,
    pub max_residual: f64,
    /// Circulation and flux residual as `[circulation, flux]`.
    pub circulation_flux: [f64; 2],
    /// Modes corrected before solving; zero if no projection was applied.
    pub projected_modes: usize,
    /// Residuals for `k = 1..=K`; real data give conjugates at `−k`.
    pub modes: Vec<ModeResidual>,
}

impl CompatibilitySection {
    pub fn new(report: &MomentReport, projected_modes: usize) -> Self {
        Self {
            admissible: report.admissible,
            tolerance: report.tolerance,
            max_residual: report.max_residual(),
            circulation_flux: [report.circulation.re, report.circulation.im],
            projected_modes,
            modes: report
                .positive
                .iter()
                .enumerate()
                .map(|(i, r)| ModeResidual {
                    k: i as i32 + 1,
                    residual: [r.re, r.im],
                    magnitude: r.norm(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SolveSection {
    pub solver: SolverKind,
    pub points: usize,
    /// Lattice points inside the obstacle or beyond the grid.
    pub outside: usize,
    pub max_speed: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub neumann_defect: Option<f64>,
}

impl SolveSection {
    pub fn new(solver: SolverKind, points: &[Point], values: &[Point], defect: Option<f64>) -> Self {
        let valid = values.iter().filter(|v| v[0].is_finite());
        Self {
            solver,
            points: points.len(),
            outside: values.iter().filter(|v| !v[0].is_finite()).count(),
            max_speed: valid.map(|v| v[0].hypot(v[1])).fold(0.0, f64::max),
            neumann_defect: defect,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct NormsSection {
    /// Exponent `N` of the weight `(1 + |x|²)^N`.
    pub weight: f64,
    pub gradient_l2: f64,
    pub deviation_h1: f64,
    pub boundary_h_half: f64,
    pub vorticity_l2: f64,
    pub divergence_l2: f64,
    pub vorticity_l2_weighted: f64,
    pub divergence_l2_weighted: f64,
    /// `‖∇v‖ / (‖ρ‖ + ‖w‖ + ‖g‖_{1/2})`.
    pub gradient_ratio: f64,
    /// `‖v − v∞‖_{H¹} / (‖ρ‖_N + ‖w‖_N + ‖g‖_{1/2})`.
    pub deviation_ratio: f64,
}

#[derive(Debug, Serialize)]
pub struct OracleSection {
    pub angles: usize,
    pub panels: usize,
    pub order: usize,
    pub boundary_nodes: usize,
    pub points: usize,
    /// `max |v_oracle − v_solver| / max |v_oracle|` over valid points.
    pub relative_gap: f64,
}

impl OracleSection {
    pub fn new(res: OracleResolution, oracle: &[Point], solver: &[Point]) -> Self {
        let (mut gap, mut scale): (f64, f64) = (0.0, 0.0);
        for (a, b) in oracle.iter().zip(solver) {
            if a[0].is_finite() && b[0].is_finite() {
                gap = gap.max((a[0] - b[0]).hypot(a[1] - b[1]));
                scale = scale.max(a[0].hypot(a[1]));
            }
        }
        Self {
            angles: res.angles,
            panels: res.panels,
            order: res.order,
            boundary_nodes: res.boundary_nodes,
            points: oracle.len(),
            relative_gap: if scale > 0.0 { gap / scale } else { gap },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub config: ProblemConfig,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub interpolation_error: BTreeMap<String, f64>,
    pub compatibility: CompatibilitySection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solve: Option<SolveSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norms: Option<NormsSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSection>,
}

impl Report {
    pub fn new(command: &str, config: &ProblemConfig, compatibility: CompatibilitySection) -> Self {
        Self {
            command: command.to_string(),
            config: config.clone(),
            interpolation_error: BTreeMap::new(),
            compatibility,
            solve: None,
            norms: None,
            oracle: None,
        }
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(format!("cannot serialise report: {e}")))
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let text = self.to_toml()?;
        std::fs::write(path, text).map_err(|e| CliError::io(path, e))
    }
}

/// Writes `x1,x2,v1,v2` rows; points without a value are written as `NaN`.
pub fn write_points(path: &Path, points: &[Point], values: &[Point]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::io(path, e);
    let file = File::create(path).map_err(io)?;
    let mut writer = csv::Writer::from_writer(std::io::BufWriter::new(file));
    let csv_err = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(e) => CliError::io(path, e),
        other => CliError::Config(format!("{other:?}")),
    };
    writer.write_record(["x1", "x2", "v1", "v2"]).map_err(csv_err)?;
    for (p, v) in points.iter().zip(values) {
        writer
            .write_record([p[0], p[1], v[0], v[1]].map(|x| format!("{x:e}")))
            .map_err(csv_err)?;
    }
    let mut inner = writer.into_inner().map_err(|e| io(e.into_error()))?;
    inner.flush().map_err(io)
}
