//! Command-line surface: subcommands and flags. Every option is optional at
//! parse time; defaults and the optional config file are resolved in
//! [`crate::config`].

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "mollify",
    about = "Spectral mollification filters for backward heat and fractional diffusion problems",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve the initial state and write the exact final data (FLD1).
    Forward(CommonArgs),
    /// Add noise, select beta, reconstruct; write the field and run record.
    Reconstruct(CommonArgs),
    /// Run the parameter selection only; write the selection record.
    SelectBeta(CommonArgs),
    /// Convergence-rate study over a decreasing grid of noise levels.
    RateStudy(CommonArgs),
    /// Monte Carlo study over replicated noise draws.
    MonteCarlo(CommonArgs),
}

impl Command {
    pub fn common(&self) -> &CommonArgs {
        match self {
            Command::Forward(c)
            | Command::Reconstruct(c)
            | Command::SelectBeta(c)
            | Command::RateStudy(c)
            | Command::MonteCarlo(c) => c,
        }
    }
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// Optional flat `key = value` config file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Built-in example (1-4); mutually exclusive with --u0.
    #[arg(long)]
    pub example: Option<u8>,

    /// Samples per axis (even), default 256.
    #[arg(long)]
    pub n: Option<usize>,

    /// Spatial half-width, default 10.
    #[arg(long)]
    pub l: Option<f64>,

    /// Noise percentage of the data norm, default 1.
    #[arg(long)]
    pub noise_pct: Option<f64>,

    /// Base RNG seed, default 0.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Selection rule: apriori | morozov (default apriori).
    #[arg(long)]
    pub rule: Option<String>,

    /// A-priori constant c, default 0.2 (0.02 for example 4).
    #[arg(long)]
    pub c: Option<f64>,

    /// Mollifier small-frequency exponent s, default 2.
    #[arg(long)]
    pub s_exp: Option<f64>,

    /// Morozov exponent r in (0, 1], default 1.
    #[arg(long)]
    pub r: Option<f64>,

    /// Morozov initial guess, default 10.
    #[arg(long)]
    pub beta0: Option<f64>,

    /// Morozov descent ratio in (0, 1), default 0.98.
    #[arg(long)]
    pub q: Option<f64>,

    /// Truncate the diffusion symbol to |xi| <= radius (noisy operator).
    #[arg(long)]
    pub trunc_radius: Option<f64>,

    /// Output directory, default ".".
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Worker threads (0 = automatic), default 0.
    #[arg(long)]
    pub threads: Option<usize>,

    /// Custom initial state (FLD1); requires --tau and --gamma-file.
    #[arg(long)]
    pub u0: Option<PathBuf>,

    /// Fractional exponent tau in (0, 1] for custom problems.
    #[arg(long)]
    pub tau: Option<f64>,

    /// Tabulated conductivity CSV (`t,gamma`) for custom problems.
    #[arg(long)]
    pub gamma_file: Option<PathBuf>,

    /// Monte Carlo replications, default 200.
    #[arg(long)]
    pub reps: Option<usize>,

    /// Rate-study noise grid: comma-separated decreasing percentages,
    /// default 10,5,2,1,0.5,0.2,0.1.
    #[arg(long)]
    pub noise_grid: Option<String>,
}
