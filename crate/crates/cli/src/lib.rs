//! Command-line front end: experiment configs in, CSV/JSON data out.
//!
//! Exit codes: 0 success, 1 identity/validation failure, 2 invalid
//! configuration, 3 numerical failure. Machine-readable errors go to stderr
//! as one JSON object.

pub mod commands;
pub mod config;
pub mod output;

use clap::{Parser, Subcommand};
use std::path::PathBuf;

use output::OutputFormat;

/// Application-level error with the exit-code contract baked in.
#[derive(Debug)]
pub struct AppError {
    pub code: i32,
    pub message: String,
    pub context: String,
}

impl AppError {
    pub fn config(e: impl std::fmt::Display) -> Self {
        AppError { code: 2, message: e.to_string(), context: "configuration".into() }
    }

    pub fn config_msg(m: impl Into<String>) -> Self {
        AppError { code: 2, message: m.into(), context: "configuration".into() }
    }

    pub fn numerical(e: impl std::fmt::Display) -> Self {
        AppError { code: 3, message: e.to_string(), context: "numerical".into() }
    }

    pub fn validation(m: impl Into<String>) -> Self {
        AppError { code: 1, message: m.into(), context: "validation".into() }
    }

    pub fn io(m: impl Into<String>) -> Self {
        AppError { code: 2, message: m.into(), context: "io".into() }
    }

    pub fn stderr_json(&self) -> String {
        serde_json::json!({
            "code": self.code,
            "message": self.message,
            "context": self.context,
        })
        .to_string()
    }
}

impl From<uamo_core::CoreError> for AppError {
    fn from(e: uamo_core::CoreError) -> Self {
        use uamo_core::CoreError::*;
        match e {
            InvalidParams(_) | InvalidLattice(_) | InvalidState(_) => AppError::config(e),
            _ => AppError::numerical(e),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "uamo-lab",
    version,
    about = "Quasiperiodic-walk experiments: dynamics, spectra, winding numbers, phase diagrams"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory (default: current directory).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// RNG seed for stochastic extras (Poisson resampling, random states).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads for grid sweeps (0 = all cores). The UAMO_LAB_THREADS
    /// environment variable overrides this flag.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    /// Output format for tabular data.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: OutputFormat,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evolve a walker and export distributions and observables.
    Evolve,
    /// Eigenvalues, quasienergies and phase classification on a ring.
    Spectrum,
    /// Spectral winding numbers over base points and eta values.
    Winding,
    /// Coupling-plane grid of a spreading observable at fixed time.
    PhaseDiagram,
    /// Closed-form critical data for one coupling pair.
    Critical {
        #[arg(long, allow_hyphen_values = true)]
        lambda1: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        lambda2: Option<f64>,
    },
    /// Run the full identity suite; nonzero exit on any failure.
    Validate {
        /// Flip a sign in the half-wave plate to prove the harness catches
        /// faults.
        #[arg(long)]
        inject_fault: bool,
    },
    /// One-command reproduction of a named figure dataset.
    Reproduce {
        /// One of: fig1a, fig2g, fig2h, fig3, fig4, figS3.
        figure: String,
    },
}

/// Resolve the worker-thread count: environment beats flag.
pub fn resolve_threads(flag: usize) -> usize {
    std::env::var("UAMO_LAB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(flag)
}

pub fn build_thread_pool(threads: usize) -> Result<rayon::ThreadPool, AppError> {
    let mut b = rayon::ThreadPoolBuilder::new().stack_size(32 * 1024 * 1024);
    if threads > 0 {
        b = b.num_threads(threads);
    }
    b.build()
        .map_err(|e| AppError::config_msg(format!("thread pool: {e}")))
}

pub fn run(cli: &Cli) -> Result<(), AppError> {
    let out_dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let threads = resolve_threads(cli.threads);
    match &cli.command {
        Command::Evolve => commands::evolve::run(cli, &out_dir),
        Command::Spectrum => commands::spectrum::run(cli, &out_dir),
        Command::Winding => commands::winding::run(cli, &out_dir),
        Command::PhaseDiagram => commands::phase_diagram::run(cli, &out_dir, threads),
        Command::Critical { lambda1, lambda2 } => {
            commands::critical::run(cli, &out_dir, *lambda1, *lambda2)
        }
        Command::Validate { inject_fault } => {
            commands::validate::run(cli, &out_dir, *inject_fault)
        }
        Command::Reproduce { figure } => commands::reproduce::run(cli, &out_dir, figure, threads),
    }
}
