//! Problem description files.
//!
//! ```toml
//! [domain]
//! kind = "joukowski"
//! r0 = 1.0
//! c = 0.5
//!
//! [grid]
//! rmax = 8.0
//! nodes = 4000
//! modes = 16
//!
//! [far_field]
//! v1 = 1.0
//! v2 = 0.0
//!
//! [boundary]
//! preset = "slip"
//!
//! [output.lattice]
//! kind = "cartesian"
//! x1 = [-4.0, 4.0]
//! x2 = [-4.0, 4.0]
//! n1 = 81
//! n2 = 81
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub domain: Domain,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub far_field: FarFieldConfig,
    #[serde(default)]
    pub vorticity: SourceConfig,
    #[serde(default)]
    pub divergence: SourceConfig,
    #[serde(default)]
    pub boundary: BoundaryConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub norms: NormsConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Domain {
    Disk { r0: f64 },
    Joukowski { r0: f64, c: f64 },
}

impl Domain {
    pub fn r0(&self) -> f64 {
        match *self {
            Domain::Disk { r0 } | Domain::Joukowski { r0, .. } => r0,
        }
    }

    /// Joukowski parameter; zero for the disk.
    pub fn c(&self) -> f64 {
        match *self {
            Domain::Disk { .. } => 0.0,
            Domain::Joukowski { c, .. } => c,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum GradingConfig {
    Uniform,
    #[default]
    Geometric,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    /// Outer radius in disk coordinates.
    pub rmax: f64,
    /// Radial intervals.
    pub nodes: usize,
    pub grading: GradingConfig,
    /// Largest Fourier mode `K`.
    pub modes: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            rmax: 8.0,
            nodes: 2000,
            grading: GradingConfig::Geometric,
            modes: 16,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FarFieldConfig {
    pub v1: f64,
    pub v2: f64,
}

/// One term `c b(r) e^{ikφ}` plus its conjugate, with `b` a smooth bump on
/// `[inner, outer]` in disk coordinates.
#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub k: u32,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
    pub inner: f64,
    pub outer: f64,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(tag = "preset", rename_all = "lowercase", deny_unknown_fields)]
pub enum SourceConfig {
    #[default]
    Zero,
    /// Sum of bump terms given in disk coordinates.
    Modes { terms: Vec<TermConfig> },
    /// Samples on a tensor lattice, bilinearly interpolated.
    File { path: PathBuf },
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CoefficientConfig {
    pub k: i32,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(tag = "preset", deny_unknown_fields)]
pub enum BoundaryConfig {
    /// Potential-flow slip velocity for the far field.
    #[serde(rename = "slip")]
    Slip,
    #[default]
    #[serde(rename = "no-slip")]
    NoSlip,
    /// Polar Fourier coefficients on the disk boundary; missing `-k`
    /// entries are filled in by conjugation.
    #[serde(rename = "coefficients")]
    Coefficients {
        #[serde(default)]
        g_r: Vec<CoefficientConfig>,
        #[serde(default)]
        g_phi: Vec<CoefficientConfig>,
    },
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq, Eq, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    #[default]
    Direct,
    Stream,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub method: SolverKind,
    pub tolerance: f64,
    pub strict: bool,
    /// Project the data onto the admissible set for modes `k ≤ project`
    /// before solving; zero disables the projection.
    pub project: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: SolverKind::Direct,
            tolerance: divcurl::compatibility::DEFAULT_TOLERANCE,
            strict: false,
            project: 0,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct NormsConfig {
    /// Weight exponent `N` of `L_{2,N}`.
    pub weight: f64,
}

impl Default for NormsConfig {
    fn default() -> Self {
        Self { weight: 2.0 }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    pub points: Vec<[f64; 2]>,
    pub angles: usize,
    pub panels: usize,
    pub order: usize,
    pub boundary_nodes: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        let res = divcurl::OracleResolution::default();
        Self {
            points: Vec::new(),
            angles: res.angles,
            panels: res.panels,
            order: res.order,
            boundary_nodes: res.boundary_nodes,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Lattice {
    Cartesian {
        x1: [f64; 2],
        x2: [f64; 2],
        n1: usize,
        n2: usize,
    },
    /// Radii are `|Φ(x)|`, i.e. physical radii for the disk; the default
    /// range is `[r0, min(4 r0, rmax)]`.
    Polar {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r: Option<[f64; 2]>,
        nr: usize,
        nphi: usize,
    },
}

impl Default for Lattice {
    fn default() -> Self {
        Lattice::Polar {
            r: None,
            nr: 31,
            nphi: 64,
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub lattice: Lattice,
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub strict: bool,
    pub solver: Option<SolverKind>,
    pub modes: Option<usize>,
    pub grid_nodes: Option<usize>,
    pub rmax: Option<f64>,
}

impl ProblemConfig {
    /// Reads, overrides and validates a configuration. Relative data paths
    /// are resolved against the directory of the file.
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut config: ProblemConfig = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for source in [&mut config.vorticity, &mut config.divergence] {
            if let SourceConfig::File { path } = source {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
            }
        }
        config.apply(overrides);
        config.resolve();
        config.validate()?;
        Ok(config)
    }

    pub fn apply(&mut self, o: &Overrides) {
        self.solver.strict |= o.strict;
        if let Some(kind) = o.solver {
            self.solver.method = kind;
        }
        if let Some(k) = o.modes {
            self.grid.modes = k;
        }
        if let Some(m) = o.grid_nodes {
            self.grid.nodes = m;
        }
        if let Some(r) = o.rmax {
            self.grid.rmax = r;
        }
    }

    /// Fills in values that default relative to other settings.
    pub fn resolve(&mut self) {
        let r0 = self.domain.r0();
        if let Lattice::Polar { r: r @ None, .. } = &mut self.output.lattice {
            *r = Some([r0, (4.0 * r0).min(self.grid.rmax)]);
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        let r0 = self.domain.r0();
        if !(r0 > 0.0 && r0.is_finite()) {
            return bad(format!("domain.r0 must be positive, got {r0}"));
        }
        let c = self.domain.c();
        if !(0.0..=r0).contains(&c) {
            return bad(format!("domain.c must lie in [0, r0 = {r0}], got {c}"));
        }
        if self.grid.modes < 1 {
            return bad("grid.modes must be at least 1".into());
        }
        if !(self.grid.rmax > r0) {
            return bad(format!("grid.rmax = {} must exceed r0 = {r0}", self.grid.rmax));
        }
        if self.grid.nodes < 8 {
            return bad(format!("grid.nodes must be at least 8, got {}", self.grid.nodes));
        }
        if !(self.solver.tolerance > 0.0) {
            return bad("solver.tolerance must be positive".into());
        }
        if self.norms.weight < 0.0 {
            return bad("norms.weight must be nonnegative".into());
        }
        for (name, source) in [("vorticity", &self.vorticity), ("divergence", &self.divergence)] {
            match source {
                SourceConfig::Zero => {}
                SourceConfig::Modes { terms } => {
                    for t in terms {
                        if !(t.inner >= r0 && t.inner < t.outer) {
                            return bad(format!(
                                "{name}: bump support [{}, {}] must satisfy r0 ≤ inner < outer",
                                t.inner, t.outer
                            ));
                        }
                        if t.k as usize > self.grid.modes {
                            return bad(format!(
                                "{name}: mode {} exceeds grid.modes = {}",
                                t.k, self.grid.modes
                            ));
                        }
                    }
                }
                SourceConfig::File { path } => {
                    if !path.is_file() {
                        return bad(format!("{name}: data file {} does not exist", path.display()));
                    }
                }
            }
        }
        if let BoundaryConfig::Coefficients { g_r, g_phi } = &self.boundary {
            for c in g_r.iter().chain(g_phi) {
                if c.k.unsigned_abs() as usize > self.grid.modes {
                    return bad(format!(
                        "boundary: mode {} exceeds grid.modes = {}",
                        c.k, self.grid.modes
                    ));
                }
                if c.k == 0 && c.im != 0.0 {
                    return bad("boundary: the k = 0 coefficient of a real trace is real".into());
                }
            }
        }
        if self.solver.method == SolverKind::Stream {
            if self.divergence != SourceConfig::Zero {
                return bad("the stream solver needs divergence-free data".into());
            }
            if self.boundary != BoundaryConfig::NoSlip {
                return bad("the stream solver needs a no-slip boundary".into());
            }
        }
        let lattice_ok = match &self.output.lattice {
            Lattice::Cartesian { n1, n2, .. } => *n1 >= 1 && *n2 >= 1,
            Lattice::Polar { r, nr, nphi } => {
                let [lo, hi] = r.unwrap_or([r0, r0]);
                *nr >= 1 && *nphi >= 1 && lo >= r0 && lo <= hi && hi <= self.grid.rmax
            }
        };
        if !lattice_ok {
            return bad(format!(
                "output.lattice needs a point per direction and polar radii inside [r0, rmax] = [{r0}, {}]",
                self.grid.rmax
            ));
        }
        if self.oracle.angles < 8 || self.oracle.panels < 1 || self.oracle.order < 2 {
            return bad("oracle resolution too small".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ProblemConfig, CliError> {
        let c: ProblemConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    #[test]
    fn minimal_config_uses_defaults() {
        let c = parse("[domain]\nkind = \"disk\"\nr0 = 1.0\n").unwrap();
        assert_eq!(c.grid, GridConfig::default());
        assert_eq!(c.boundary, BoundaryConfig::NoSlip);
        assert_eq!(c.solver.method, SolverKind::Direct);
    }

    #[test]
    fn presets_parse() {
        let c = parse(
            r#"
            [domain]
            kind = "joukowski"
            r0 = 1.0
            c = 0.5
            [vorticity]
            preset = "modes"
            terms = [{ k = 1, re = 0.5, inner = 1.2, outer = 2.0 }]
            [boundary]
            preset = "coefficients"
            g_phi = [{ k = 1, re = 0.0, im = 1.0 }]
            "#,
        )
        .unwrap();
        assert_eq!(c.domain.c(), 0.5);
        assert!(matches!(c.vorticity, SourceConfig::Modes { ref terms } if terms.len() == 1));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        for text in [
            "[domain]\nkind = \"disk\"\nr0 = -1.0\n",
            "[domain]\nkind = \"joukowski\"\nr0 = 1.0\nc = 2.0\n",
            "[domain]\nkind = \"disk\"\nr0 = 1.0\n[grid]\nmodes = 0\n",
            "[domain]\nkind = \"disk\"\nr0 = 1.0\n[grid]\nrmax = 0.5\n",
            "[domain]\nkind = \"square\"\nr0 = 1.0\n",
            "[domain]\nkind = \"disk\"\nr0 = 1.0\n[vorticity]\npreset = \"vortex\"\n",
            "[domain]\nkind = \"disk\"\nr0 = 1.0\nextra = 3\n",
            "[domain]\nkind = \"disk\"\nr0 = 1.0\n[boundary]\npreset = \"slip\"\n[solver]\nmethod = \"stream\"\n",
        ] {
            assert!(matches!(parse(text), Err(CliError::Config(_))), "{text}");
        }
    }

    #[test]
    fn overrides_take_precedence() {
        let mut c = parse("[domain]\nkind = \"disk\"\nr0 = 1.0\n").unwrap();
        c.apply(&Overrides {
            strict: true,
            solver: Some(SolverKind::Stream),
            modes: Some(4),
            grid_nodes: Some(100),
            rmax: Some(3.0),
        });
        assert!(c.solver.strict);
        assert_eq!((c.grid.modes, c.grid.nodes, c.grid.rmax), (4, 100, 3.0));
        assert_eq!(c.solver.method, SolverKind::Stream);
    }
}
