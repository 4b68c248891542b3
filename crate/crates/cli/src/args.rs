use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use swb_core::data_model::Dimension;
use swb_core::features::FeatureSet;
use swb_core::regressors::Algorithm;

#[derive(Debug, Parser)]
#[command(name = "swb", version, about = "Well-being sensing from social-media records")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic corpus with a planted label model.
    Generate(GenerateArgs),
    /// Extract a feature matrix to CSV plus its normalization parameters.
    Extract(ExtractArgs),
    /// Cross-validate every (dimension, feature set, algorithm) cell.
    Sweep(SweepArgs),
    /// Feature correlations, group t-tests and age correlations.
    Analyze(AnalyzeArgs),
    /// Re-render a saved report.json as text.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Number of users.
    #[arg(long)]
    pub n: Option<usize>,
    /// Falls back to SWB_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
    /// Match the reported gender and living-place proportions.
    #[arg(long)]
    pub paper_marginals: bool,
    /// Generator config JSON; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Lexicon the post texts are drawn from (default: bundled demo lexicon).
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
}

/// Options shared by every command that reads a dataset.
#[derive(Debug, Args)]
pub struct DataArgs {
    /// Dataset file (.jsonl).
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Lexicon `.dic` file, or `demo` for the bundled lexicon.
    #[arg(long)]
    pub lexicon: Option<String>,
    /// Days before the survey time in the feature window.
    #[arg(long)]
    pub before_days: Option<i64>,
    /// Days after the survey time in the feature window.
    #[arg(long)]
    pub after_days: Option<i64>,
    /// Keep only users with more than this many statuses.
    #[arg(long)]
    pub active_threshold: Option<u64>,
    /// Run config JSON; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Feature families, e.g. `D,B,L` or `D+B`.
    #[arg(long)]
    pub families: Option<FeatureSet>,
    /// Feature CSV path.
    #[arg(long)]
    pub out: PathBuf,
    /// Normalization JSON path (default: next to the CSV).
    #[arg(long)]
    pub normalization: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Comma-separated algorithms.
    #[arg(long, value_delimiter = ',')]
    pub algorithms: Option<Vec<Algorithm>>,
    /// Feature-set combination; repeat for several (default: all seven).
    #[arg(long = "families")]
    pub combos: Option<Vec<FeatureSet>>,
    /// Comma-separated dimensions (P.A., N.A., ...).
    #[arg(long, value_delimiter = ',', value_parser = parse_dimension)]
    pub dimensions: Option<Vec<Dimension>>,
    #[arg(long)]
    pub folds: Option<usize>,
    /// Fold-assignment seed; falls back to SWB_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Parallel grid-cell workers (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Directory receiving report.json and report.txt.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Exit with status 3 if any solver hit its iteration cap.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Directory receiving analysis.json and analysis.txt.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// A report.json written by `sweep`.
    #[arg(long)]
    pub input: PathBuf,
    /// Output path (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn parse_dimension(s: &str) -> Result<Dimension, String> {
    Dimension::parse(s).ok_or_else(|| format!("unknown dimension {s:?}"))
}
