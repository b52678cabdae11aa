use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "qbsc", version, about = "Security analysis and simulation of coherent-state bit string commitment")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form security table over a range of constellation sizes.
    Table(TableArgs),
    /// Check the closed forms against the photon-level Monte Carlo.
    Validate(ValidateArgs),
    /// Run one commit/reveal session and write its transcript.
    Session(SessionArgs),
    /// Security metrics across a sweep of one parameter.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Physics {
    /// Overlap between neighboring polarization states.
    #[arg(long, default_value_t = 0.5)]
    pub rs1: f64,
    /// Quantum efficiency of Bob's main detector.
    #[arg(long, default_value_t = 0.75)]
    pub mu: f64,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[command(flatten)]
    pub physics: Physics,
    #[arg(long, default_value_t = 2)]
    pub m_min: usize,
    #[arg(long, default_value_t = 12)]
    pub m_max: usize,
    /// Single constellation size (sets both --m-min and --m-max).
    #[arg(long, conflicts_with_all = ["m_min", "m_max"])]
    pub m: Option<usize>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[command(flatten)]
    pub physics: Physics,
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
    #[arg(long, env = "QBSC_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Choice used for the honest-session check.
    #[arg(long, default_value_t = 0)]
    pub choice: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyName {
    Honest,
    NeighborCheat,
    Underpower,
}

#[derive(Debug, Args)]
pub struct SessionArgs {
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[command(flatten)]
    pub physics: Physics,
    #[arg(long, default_value_t = 0)]
    pub choice: usize,
    #[arg(long, value_enum, default_value_t = StrategyName::Honest)]
    pub strategy: StrategyName,
    /// Photon-number scale for the underpower strategy.
    #[arg(long, default_value_t = 0.5)]
    pub factor: f64,
    #[arg(long, env = "QBSC_SEED", default_value_t = 0)]
    pub seed: u64,
    /// JSON Lines transcript path; stdout when omitted.
    #[arg(long, visible_alias = "out")]
    pub transcript: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    Rs1,
    Mu,
    M,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub param: SweepParam,
    /// Comma-separated values, e.g. `0.1,0.3,0.5`.
    #[arg(long, value_delimiter = ',', required_unless_present = "range", conflicts_with = "range")]
    pub values: Vec<f64>,
    /// Inclusive `start:stop:step` range.
    #[arg(long)]
    pub range: Option<String>,
    /// Fixed constellation size when not swept.
    #[arg(long, default_value_t = 4)]
    pub m: usize,
    #[command(flatten)]
    pub physics: Physics,
    #[command(flatten)]
    pub output: Output,
}
