use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum DivCurlError {
    #[error("invalid radial grid: {0}")]
    InvalidGrid(String),

    #[error(
        "{angles} angular samples cannot resolve modes up to |k| = {max_mode} \
         without aliasing (need at least {required})"
    )]
    Aliasing {
        angles: usize,
        max_mode: usize,
        required: usize,
    },

    #[error("sample array has {actual} values, expected {expected}")]
    ShapeMismatch { expected: usize, actual: usize },

    #[error("integration range [{a}, {b}] lies outside the grid span [{lo}, {hi}]")]
    RangeOutsideGrid { a: f64, b: f64, lo: f64, hi: f64 },

    #[error("fields live on different grids or mode ranges: {0}")]
    IncompatibleFields(String),

    #[error("mode {k} is outside the admissible range: {reason}")]
    InvalidMode { k: i32, reason: String },

    #[error("correction bump has a vanishing moment at k = {k} (moment {moment:e})")]
    DegenerateBump { k: i32, moment: f64 },

    #[error("invalid map parameters: {0}")]
    InvalidMap(String),

    #[error("map failed asymptotic check at |z| = {radius}: {detail}")]
    MapAsymptotics { radius: f64, detail: String },

    #[error("point ({x}, {y}) is not in the fluid domain")]
    PointInSolid { x: f64, y: f64 },

    #[error("coincident points in Green's function evaluation")]
    CoincidentPoints,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, DivCurlError>;
