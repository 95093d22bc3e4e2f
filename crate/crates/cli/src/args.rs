use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Exact projector deviations and the perturbation bounds that estimate them.
#[derive(Debug, Parser)]
#[command(name = "projbound", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the deviation identities on a pair of matrices.
    Verify(PairArgs),
    /// Evaluate every bound on a pair of matrices against the exact deviations.
    Bounds(BoundsArgs),
    /// Sweep one of the diagonal examples over an epsilon grid.
    Sweep(SweepArgs),
    /// Write the comparison tables and line charts for both diagonal examples.
    Reproduce(ReproduceArgs),
    /// Tightness statistics over a seeded random ensemble.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Directory for report files. Without it reports go to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated subset of csv, json, svg.
    #[arg(long, value_delimiter = ',')]
    pub format: Option<Vec<Format>>,
    /// Relative tolerance for residual and sandwich checks.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// Matrix file for A.
    #[arg(long)]
    pub a: PathBuf,
    /// Matrix file for B.
    #[arg(long)]
    pub b: PathBuf,
    /// Absolute singular value cutoff for numerical rank
    /// (default: max(m, n) * eps * sigma_1).
    #[arg(long)]
    pub rank_tol: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[command(flatten)]
    pub bounds: BoundOptions,
}

#[derive(Debug, Args)]
pub struct BoundOptions {
    /// Grid for the weight parameters of the combined families, as start:stop:count.
    #[arg(long, default_value = "0:1:5")]
    pub param_grid: String,
    /// Report equal-rank formulas as inapplicable even when the ranks agree.
    #[arg(long)]
    pub force_general_rank: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Scenario {
    /// A = diag(1, 0), B = diag(eps/(1+eps), eps/10).
    #[value(name = "example-4.1")]
    #[serde(rename = "example-4.1")]
    Example41,
    /// A = diag(1, 0), B = diag(2 eps/(1+eps), eps).
    #[value(name = "example-4.2")]
    #[serde(rename = "example-4.2")]
    Example42,
    /// The 2x2 pair where CHEN_UP beats LI_UP, plus three diagonal pairs where it does not.
    #[value(name = "intro")]
    #[serde(rename = "intro")]
    Intro,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value = "example-4.1")]
    pub scenario: Scenario,
    /// Epsilon grid as start:stop:count, inside (0.1, 1). Default 0.11:0.99:90.
    #[arg(long)]
    pub grid: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// Epsilon grid as start:stop:count, inside (0.1, 1). Default 0.11:0.99:90.
    #[arg(long)]
    pub grid: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 6)]
    pub m: usize,
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub rank_a: usize,
    #[arg(long, default_value_t = 3)]
    pub rank_b: usize,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Build B from A + t G instead of drawing it independently.
    #[arg(long)]
    pub perturb_scale: Option<f64>,
    /// Singular value profile: "uniform" or "geometric:<ratio>".
    #[arg(long, default_value = "uniform")]
    pub profile: String,
    #[command(flatten)]
    pub bounds: BoundOptions,
    #[command(flatten)]
    pub output: OutputArgs,
}
