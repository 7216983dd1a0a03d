//! `rbo` — command-line driver for the rotation-modified Benjamin-Ono
//! laboratory: ground-state solves, time evolution, orbital-stability
//! experiments, the small-rotation convergence study, linearized-operator
//! spectra, and closed-form soliton checks.
//!
//! Every command is deterministic given its configuration and seed: reruns
//! reproduce CSV and field outputs byte for byte (run sidecars additionally
//! record wall-clock time, which of course varies).

mod commands;
mod config;
mod fields;
mod report;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use config::FlagOverrides;

/// Everything that can go wrong at the command-line layer, classified by
/// exit code: configuration problems exit 2, numerical failures 3, I/O 4.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] rbo_core::CoreError),
    #[error("I/O failure: {0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

const AFTER_HELP: &str = "\
CONFIGURATION KEYS (key = value file, --set key=value, or direct flags)
  n            grid points, power of two >= 16            [1024]
  half_length  half-width L of the domain [-L, L)         [64]
  c            wave speed (> 0)                           [1]
  gamma        rotation strength (>= 0)                   [0.01]
  gamma_list   comma-separated, strictly decreasing > 0   [empty]
  tol          solver convergence target (> 0)            [1e-10]
  max_iter     solver iteration cap (>= 1)                [500]
  alpha        Petviashvili stabilizer exponent in [1, 3] [2]
  seed_profile solver seed: gaussian | sech2 | soliton    [soliton]
  damping      solver under-relaxation in (0, 1] | none   [none]
  dt           time step, or auto (advisory from data)    [auto]
  t_end        evolve horizon (>= 0)                      [1]
  save_stride  snapshot cadence in steps (>= 1)           [10]
  dealias      2/3-rule dealiasing: true | false          [true]
  amp          perturbation amplitude, relative (>= 0)    [0.01]
  seed         perturbation RNG seed (u64)                [42]
  t_horizon    stability horizon (>= 0)                   [50]
  ensemble     stability members, seeds seed..seed+k      [1]
  initial      field file for evolve; empty = built-in    [empty]
  out_dir      output directory                           [.]

Precedence: defaults < config file < --set (in order) < direct flags.
Unknown keys are errors. The resolved configuration is echoed with each
value's source and recorded in every run's JSON sidecar.

EXIT CODES
  0 success    2 configuration error    3 numerical failure    4 I/O failure

ENVIRONMENT
  RBO_WORKERS  worker threads for the stability ensemble (default: all
               cores). Output ordering and bytes are independent of it.";

/// Pseudospectral laboratory for the rotation-modified Benjamin-Ono equation.
#[derive(Parser)]
#[command(name = "rbo", version, about, after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Plain-text `key = value` configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override one configuration key (repeatable).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Wave speed (overrides the `c` key).
    #[arg(long, global = true)]
    c: Option<f64>,
    /// Rotation strength (overrides the `gamma` key).
    #[arg(long, global = true)]
    gamma: Option<f64>,
    /// Perturbation RNG seed (overrides the `seed` key).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (overrides the `out_dir` key).
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the solitary-wave profile at (c, gamma) and write it as a field file.
    GroundState,
    /// Integrate the evolution equation from a field file or a fresh perturbed profile.
    Evolve,
    /// Perturb a solved profile and track its orbital distance over a time horizon.
    Stability,
    /// Warm-started continuation down a gamma list; one CSV row per gamma.
    ConvergeGamma,
    /// Certify constrained coercivity of the linearized operator at a solved profile.
    Spectrum,
    /// Evaluate the closed-form zero-rotation soliton and its invariants at speed c.
    SolitonCheck,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file_text = match &cli.config {
        Some(path) => Some(fs::read_to_string(path).map_err(|e| {
            CliError::Io(format!("reading configuration {}: {e}", path.display()))
        })?),
        None => None,
    };
    let flags = FlagOverrides {
        c: cli.c,
        gamma: cli.gamma,
        seed: cli.seed,
        out_dir: cli.out_dir.clone(),
    };
    let resolved = config::resolve(file_text.as_deref(), &cli.set, &flags)?;

    println!("# configuration");
    for (key, value, source) in &resolved.entries {
        let shown = if value.is_empty() { "(empty)" } else { value.as_str() };
        println!("{key} = {shown}  ({})", source.label());
    }

    fs::create_dir_all(&resolved.config.out_dir).map_err(|e| {
        CliError::Io(format!(
            "creating output directory {}: {e}",
            resolved.config.out_dir.display()
        ))
    })?;

    match cli.command {
        Command::GroundState => commands::ground_state(&resolved),
        Command::Evolve => commands::evolve(&resolved),
        Command::Stability => commands::stability(&resolved),
        Command::ConvergeGamma => commands::converge_gamma(&resolved),
        Command::Spectrum => commands::spectrum(&resolved),
        Command::SolitonCheck => commands::soliton_check(&resolved),
    }
}
