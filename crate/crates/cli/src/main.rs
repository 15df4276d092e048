//! `divcurl`: batch front end for the exterior div-curl solver.

mod config;
mod data;
mod error;
mod report;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Overrides, ProblemConfig, SolverKind};
use error::CliError;
use run::Command;

#[derive(Parser, Debug)]
#[command(version, about = "Exterior div-curl solver: compatibility checks, solves and norm reports")]
struct Cli {
    #[command(subcommand)]
    command: Action,
}

#[derive(Subcommand, Debug)]
enum Action {
    /// Evaluate the solvability conditions only.
    Check(Args),
    /// Solve and write the velocity on the output lattice.
    Solve(Args),
    /// Solve and report the norms entering the a priori estimates.
    Norms(Args),
    /// Evaluate the Biot–Savart quadrature at the configured points.
    Oracle(Args),
}

#[derive(clap::Args, Debug)]
struct Args {
    /// Problem description (TOML).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Exit with status 2 when the data violate the solvability conditions.
    #[arg(long)]
    strict: bool,
    #[arg(long, value_enum)]
    solver: Option<SolverKind>,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Largest Fourier mode K.
    #[arg(long, value_name = "K")]
    modes: Option<usize>,
    /// Radial grid intervals.
    #[arg(long, value_name = "M")]
    grid_nodes: Option<usize>,
    /// Outer radius of the radial grid.
    #[arg(long, value_name = "R")]
    rmax: Option<f64>,
}

fn execute(command: Command, args: &Args) -> Result<(), CliError> {
    let overrides = Overrides {
        strict: args.strict,
        solver: args.solver,
        modes: args.modes,
        grid_nodes: args.grid_nodes,
        rmax: args.rmax,
    };
    let config = ProblemConfig::load(&args.config, &overrides)?;
    log::info!("resolved configuration:\n{}", toml::to_string(&config).unwrap_or_default());
    let outcome = run::run(command, &config, &args.out);
    if let Ok(report) = &outcome {
        let c = &report.compatibility;
        println!(
            "admissible: {} (max residual {:.3e}, circulation {:.3e}, flux {:.3e})",
            c.admissible, c.max_residual, c.circulation_flux[0], c.circulation_flux[1]
        );
        if let Some(s) = &report.solve {
            println!("solved with {:?}: {} points, max speed {:.6}", s.solver, s.points, s.max_speed);
        }
        if let Some(n) = &report.norms {
            println!(
                "gradient ratio {:.6}, deviation ratio {:.6}",
                n.gradient_ratio, n.deviation_ratio
            );
        }
        if let Some(o) = &report.oracle {
            println!("oracle: {} points, relative gap to solver {:.3e}", o.points, o.relative_gap);
        }
        println!("report written to {}", args.out.join("report.toml").display());
    }
    outcome.map(|_| ())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (command, args) = match &cli.command {
        Action::Check(a) => (Command::Check, a),
        Action::Solve(a) => (Command::Solve, a),
        Action::Norms(a) => (Command::Norms, a),
        Action::Oracle(a) => (Command::Oracle, a),
    };
    match execute(command, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
