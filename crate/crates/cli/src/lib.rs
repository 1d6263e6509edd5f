//! Command-line front end: argument definitions and the four pipelines.
//!
//! Every command writes CSV (to `--out` or stdout) and, when `--out` is
//! given, a `<out>.manifest` file holding the resolved settings. Reals are
//! printed with 12 significant digits.

pub mod commands;
pub mod config;
pub mod experiment;
pub mod format;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "esbandit", version, about = "Early-stopping boosting as bandit exploration: simulation pipelines")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Allocation probabilities of two-step early stopping and Thompson
    /// Sampling over a grid of two-arm counts.
    TwoArmAlloc(AllocArgs),
    /// Cumulative mean reward curves of Thompson Sampling and greedy
    /// two-step early stopping.
    TwoArmReward(RewardArgs),
    /// Epoch-scheduled contextual bandit simulation from a config file.
    Simulate(SimulateArgs),
    /// Stopping-iteration histogram and truncation MSE/regret curves on a
    /// burn-in buffer.
    AnalyzeIterations(AnalyzeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AllocMethod {
    /// Exhaustive when both totals are at most 60, Monte-Carlo otherwise.
    Auto,
    Exhaustive,
    Montecarlo,
}

#[derive(Debug, clap::Args)]
pub struct AllocArgs {
    #[arg(long, default_value_t = 100)]
    pub n1: u64,
    #[arg(long, default_value_t = 100)]
    pub n2: u64,
    /// Success counts of arm 1 (comma-separated).
    #[arg(long, value_delimiter = ',', conflicts_with = "mean1")]
    pub s1: Vec<u64>,
    /// Success counts of arm 2 (comma-separated).
    #[arg(long, value_delimiter = ',', conflicts_with = "mean2")]
    pub s2: Vec<u64>,
    /// Empirical means of arm 1, rounded to counts (default 0.6).
    #[arg(long, value_delimiter = ',')]
    pub mean1: Vec<f64>,
    /// Empirical means of arm 2, rounded to counts (default 0.5).
    #[arg(long, value_delimiter = ',')]
    pub mean2: Vec<f64>,
    #[arg(long, default_value_t = esbandit::two_arm::DEFAULT_ETA)]
    pub eta: f64,
    /// Monte-Carlo samples per row, for each method.
    #[arg(long, default_value_t = 100_000)]
    pub sims: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = AllocMethod::Auto)]
    pub method: AllocMethod,
    #[arg(long, default_value_t = 1.0)]
    pub prior_alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub prior_beta: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct RewardArgs {
    #[arg(long, default_value_t = 0.6)]
    pub mean1: f64,
    #[arg(long, default_value_t = 0.4)]
    pub mean2: f64,
    #[arg(long, default_value_t = 2000)]
    pub horizon: usize,
    #[arg(long, default_value_t = 200)]
    pub replications: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = esbandit::two_arm::DEFAULT_ETA)]
    pub eta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub prior_alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub prior_beta: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides `seed` in the config file.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides `replications` in the config file.
    #[arg(long)]
    pub replications: Option<usize>,
}

#[derive(Debug, clap::Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides `seed` in the config file.
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::TwoArmAlloc(a) => commands::two_arm_alloc(&a),
        Command::TwoArmReward(a) => commands::two_arm_reward(&a),
        Command::Simulate(a) => commands::simulate(&a),
        Command::AnalyzeIterations(a) => commands::analyze_iterations(&a),
    }
}
