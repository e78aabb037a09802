// Copyright 2026 aptsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! `aptsim` command-line front end.
//!
//! Thin drivers over the library: every numerical column equals the
//! corresponding library output, written at 17 significant digits so files
//! parse back bit-identically. Identical configuration and seed give
//! byte-identical output files.
//!
//! Exit codes: 0 ok, 2 configuration error, 3 I/O error, 4 degenerate
//! result (all population lost).

mod commands;
mod config;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "aptsim",
    version,
    about = "Dissipative two-level dynamics under an anti-PT-symmetric Hamiltonian",
    after_help = "Units: couplings and rates (J, Gamma) are angular frequencies in 1/us; \
                  times are in us. The population loss rate on |1> is 4*Gamma."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalOpts,
}

#[derive(Args)]
pub struct GlobalOpts {
    /// JSON config file with the subcommand's parameters (flags override it)
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Output file path (stdout when omitted)
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    /// Output format (tomography always emits json)
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Base RNG seed for all shot sampling
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Shots per measured data point (command-specific default when omitted)
    #[arg(long, global = true, value_name = "N")]
    pub shots: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
pub enum Command {
    /// Closed-form time series of the density matrix and overlap signal
    Evolve(EvolveArgs),
    /// Eigenvalue-extraction protocol over a ratio sweep J/Gamma
    Eigensweep(EigensweepArgs),
    /// Bloch-sphere trajectory under the coupling-plus-loss Hamiltonian
    Trajectory(TrajectoryArgs),
    /// Shot-sampled state tomography after an anti-PT evolution
    Tomography(TomographyArgs),
    /// Synthetic calibration run (dissipation decay or resonant drive)
    Calibrate(CalibrateArgs),
    /// Built-in parameter presets for the reference figures
    Reproduce(ReproduceArgs),
}

#[derive(Args, Default)]
pub struct EvolveArgs {
    /// Coupling strength J [1/us]
    #[arg(long)]
    pub j: Option<f64>,
    /// Dissipation parameter Gamma [1/us]
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Final evolution time [us]
    #[arg(long = "tau-max")]
    pub tau_max: Option<f64>,
    /// Number of time samples (single row when tau-max is 0)
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Args, Default)]
pub struct EigensweepArgs {
    /// Nominal dissipation parameter Gamma [1/us]; must be > 0
    #[arg(long)]
    pub gamma: Option<f64>,
    /// First ratio J/Gamma of the sweep
    #[arg(long = "ratio-min")]
    pub ratio_min: Option<f64>,
    /// Last ratio J/Gamma of the sweep
    #[arg(long = "ratio-max")]
    pub ratio_max: Option<f64>,
    /// Ratio step
    #[arg(long = "ratio-step")]
    pub ratio_step: Option<f64>,
    /// Explicit comma-separated ratio list (overrides min/max/step)
    #[arg(long, value_delimiter = ',')]
    pub ratios: Option<Vec<f64>>,
    /// Protocol repetitions per point
    #[arg(long)]
    pub repeats: Option<usize>,
    /// Noiseless infinite-shot protocol instead of sampling
    #[arg(long)]
    pub exact: bool,
}

#[derive(Args, Default)]
pub struct TrajectoryArgs {
    /// Coupling strength J [1/us]
    #[arg(long)]
    pub j: Option<f64>,
    /// Dissipation parameter Gamma [1/us]
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Hold duration [us]
    #[arg(long)]
    pub tau: Option<f64>,
    /// Number of trajectory samples
    #[arg(long)]
    pub steps: Option<usize>,
    /// Initial state
    #[arg(long, value_enum)]
    pub initial: Option<InitialState>,
    /// Evaluate the C operator outside its r < 1 domain (analytic
    /// continuation; output flagged non-physical)
    #[arg(long = "allow-continuation")]
    pub allow_continuation: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialState {
    /// (|0> - |1>)/sqrt(2)
    Minus,
    /// (|0> + |1>)/sqrt(2)
    Plus,
    /// |0>
    Zero,
    /// |1>
    One,
    /// Slow eigenstate of the hold Hamiltonian
    EpsPlus,
    /// Fast eigenstate of the hold Hamiltonian
    EpsMinus,
}

#[derive(Args, Default)]
pub struct TomographyArgs {
    /// Ratio J/Gamma of the evolution
    #[arg(long)]
    pub ratio: Option<f64>,
    /// Absolute dissipation parameter Gamma [1/us]
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Evolution time [us]
    #[arg(long)]
    pub tau: Option<f64>,
    /// Infinite-shot reconstruction instead of sampling
    #[arg(long)]
    pub ideal: bool,
}

#[derive(Args, Default)]
pub struct CalibrateArgs {
    /// Which calibration to run
    #[arg(long, value_enum)]
    pub kind: Option<CalibrationKind>,
    /// True dissipation parameter for synthetic decay data [1/us]
    #[arg(long)]
    pub gamma: Option<f64>,
    /// True coupling for synthetic drive data [1/us]
    #[arg(long)]
    pub j: Option<f64>,
    /// Number of hold durations in the data set
    #[arg(long)]
    pub points: Option<usize>,
    /// Noiseless data instead of sampling
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CalibrationKind {
    Gamma,
    J,
}

#[derive(Args)]
pub struct ReproduceArgs {
    /// Which preset to emit
    #[arg(value_enum)]
    pub preset: Preset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Population of |0> vs time in both regimes (J = 0.06; Gamma 0.004 and 0.53)
    Fig2a,
    /// Pure-dissipation decay of |1> (Gamma 0.022 and 0.050)
    Fig2b,
    /// Overlap signal, theory and sampled (J = 0.065, Gamma = 0.022)
    Fig2c,
    /// Eigenvalue sweep vs J/Gamma (Gamma = 0.050, 3 repetitions)
    Fig2d,
    /// Tomography at ratio 0.15 after 10 us
    Fig3,
    /// Bloch trajectory from (|0>-|1>)/sqrt(2) (J = 0.06, Gamma = 0.03, 50 us)
    CptSphere,
}

/// Command outcomes that map onto process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, bad config file, or invalid physical parameters: exit 2.
    Config(String),
    /// Output could not be written: exit 3.
    Io(String),
    /// The computation degenerated (all population lost): exit 4.
    Degenerate(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Degenerate(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Io(m) | CliError::Degenerate(m) => m,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<aptsim::Error> for CliError {
    fn from(e: aptsim::Error) -> Self {
        match e {
            aptsim::Error::DegenerateTrace(_) => CliError::Degenerate(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("aptsim: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
