//! Spectral solver for the planar div-curl problem outside an obstacle.
//!
//! Given the divergence `ρ`, the vorticity `w`, the boundary velocity `g`
//! and the velocity at infinity `v∞`, the solver checks the moment
//! conditions that make the problem solvable and computes the velocity mode
//! by mode in polar coordinates. Obstacles other than a disk are handled
//! through a conformal map onto the exterior of a disk.
//!
//! ```
//! use divcurl::{solve_disk, DiskProblem, FarField, RadialGrid};
//!
//! let grid = RadialGrid::geometric(1.0, 10.0, 400).unwrap();
//! let mut problem = DiskProblem::zeros(&grid, 4);
//! problem.far_field = FarField::new(1.0, 0.0);
//! problem.boundary = problem.far_field.slip_trace(4);
//! let v = solve_disk(&problem).unwrap();
//! let u = v.velocity_at([0.0, 2.0]).unwrap();
//! // between radial nodes the value is interpolated
//! assert!((u[0] - 1.25).abs() < 1e-4);
//! ```

pub mod compatibility;
pub mod conformal;
pub mod disk;
pub mod error;
pub mod grid;
pub mod norms;
pub mod oracle;
pub mod source;
pub mod spectral;
pub mod stream;

pub use compatibility::{
    circulation_flux_residual, make_admissible, moment_report, moment_residual,
    no_slip_orthogonality, AdmissibleData, MomentReport,
};
pub use disk::{
    alpha_coefficient, solve_disk, solve_disk_checked, solve_mode, solve_mode_zero, DiskProblem,
    DiskSolution, FarField, ModeSolution, VelocitySolution,
};
pub use error::{DivCurlError, Result};
pub use grid::{Grading, RadialGrid};
pub use norms::{
    h1_deviation, h1_seminorm, h_half_boundary_norm, l2_deviation, l2_weighted_norm,
    WeightedNormParams,
};
pub use conformal::{
    area_moment_residual, joukowski_map, joukowski_potential_flow, mapped_moment_residual,
    pullback_problem, pushforward_velocity, solve_exterior, verify_asymptotics, AreaQuadrature,
    ConformalMap, ExteriorProblem, ExteriorSolution, Joukowski, PullbackParams, PulledBackProblem,
};
pub use oracle::{biot_savart_disk, biot_savart_omega, green_function, green_gradient, OracleResolution};
pub use source::{Bump, ModalField, ModalTerm, SynthSettings, SyntheticProblem};
pub use spectral::{analyze, synthesize, BoundaryTrace, Point, PolarSamples, SpectralField};
pub use stream::{neumann_defect, solve_stream, velocity_from_stream, StreamFunction};
