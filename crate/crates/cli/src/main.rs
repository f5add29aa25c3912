//! `microcosm` — solve the algebraic and differential Sachs/Riccati equations
//! of a homogeneous plane wave, construct its symplectic-group orbit, and
//! locate conjugate points, from a JSON description of (ω, p).
//!
//! Exit codes: 0 success, 2 validation failure, 3 numerical failure.

mod input;
mod output;
mod run;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "microcosm",
    about = "Sachs/Riccati equations, symplectic orbits, and conjugate points of homogeneous plane waves",
    long_about = "Reads a plane-wave description from a JSON file: either\n  \
                  {\"n\": 2, \"form\": \"alekseevsky\"|\"brinkmann\", \"omega\": [[..]], \"p\": [[..]]}\n\
                  or the n=2 shorthand {\"A\": .., \"B\": .., \"C\": .., \"w\": .., \"form\"?: ..}\n\
                  (shorthand ω = [[0,−w],[w,0]], p = [[A+B,C],[C,A−B]]; form defaults to alekseevsky)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Input spec file (JSON)
    #[arg(long, value_name = "FILE")]
    spec: PathBuf,
    /// Lower end of the parameter range
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    u_min: f64,
    /// Upper end of the parameter range
    #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
    u_max: f64,
    /// Number of samples across [u-min, u-max]
    #[arg(long, default_value_t = 101)]
    samples: usize,
    /// Residual tolerance used by the verification checks
    /// (module defaults: 1e-8 algebraic, 1e-6 orbit/oracle agreement)
    #[arg(long, default_value_t = 1.0e-6)]
    tol: f64,
    /// Emit a plot-ready CSV table (header `u,<entries>,residual`)
    /// instead of JSON where the command produces a sweep
    #[arg(long)]
    csv: bool,
    /// Write the output to a file instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Constant solutions of the algebraic Sachs equation
    /// (all of them for n = 2, one invariant-subspace solution for n ≥ 3)
    Riccati {
        #[command(flatten)]
        common: Common,
    },
    /// Tabulate S(u) for the initial condition S(0) = 0 from the closed-form
    /// microcosm solution, with the governing-equation residual per row
    Sachs {
        #[command(flatten)]
        common: Common,
    },
    /// Orbit generator W, H₀, M₀ and the sampled Grassmannian curve H(u)
    Orbit {
        #[command(flatten)]
        common: Common,
    },
    /// Conjugate points of u = 0 in (0, u-max], with existence reasons
    Conjugate {
        #[command(flatten)]
        common: Common,
    },
    /// Taylor coefficients Sₙ of the blowing-up Sachs solution at t = 0
    Series {
        #[command(flatten)]
        common: Common,
        /// Recursion order N (coefficients S₀…S_N; capped at 30)
        #[arg(long, default_value_t = 12)]
        order: usize,
    },
    /// Full cross-oracle verification report for the given spec
    Verify {
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Riccati { common } => run::riccati(common),
        Command::Sachs { common } => run::sachs(common),
        Command::Orbit { common } => run::orbit(common),
        Command::Conjugate { common } => run::conjugate(common),
        Command::Series { common, order } => run::series(common, *order),
        Command::Verify { common } => run::verify(common),
    };
    match result {
        Ok(()) => ExitCode::from(0),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// Error wrapper carrying the process exit code (2 validation, 3 numerical).
#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub validation: bool,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        Self {
            message: msg.into(),
            validation: true,
        }
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Self {
            message: msg.into(),
            validation: false,
        }
    }

    pub fn exit_code(&self) -> u8 {
        if self.validation {
            2
        } else {
            3
        }
    }
}

impl From<microcosm_core::Error> for CliError {
    fn from(e: microcosm_core::Error) -> Self {
        match &e {
            microcosm_core::Error::InvalidInput(_) => CliError::validation(e.to_string()),
            _ => CliError::numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::validation(format!("io: {e}"))
    }
}
