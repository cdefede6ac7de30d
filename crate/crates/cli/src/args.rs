use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "crossalloc",
    version,
    about = "Common-revenue allocation from DEA cross-efficiency and a modified Shapley value"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// CCR efficiency of every DMU.
    Ccr(CcrArgs),
    /// Cross-efficiency matrix from the ally/adversary secondary goal.
    Crosseff(CrosseffArgs),
    /// Modified Shapley values with optimistic and pessimistic bounds.
    Shapley(GameArgs),
    /// Split a revenue by the modified Shapley values.
    Allocate(AllocateArgs),
    /// Every stage from raw data to allocation in one report.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Convention {
    Exclude,
    Unit,
    /// Pick whichever convention best matches the `phi` column of --reference.
    Calibrate,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Decimal places in CSV reports; JSON always carries full precision.
    #[arg(long, default_value_t = 2)]
    pub precision: usize,
    /// Worker threads (defaults to one per core).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Leave the timestamp out of the report so reruns are byte-identical.
    #[arg(long)]
    pub no_timestamp: bool,
    /// Report destination; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GroupingArgs {
    /// `dmu,group` file of ally sets.
    #[arg(long, conflicts_with = "clusters")]
    pub groups: Option<PathBuf>,
    /// Number of ally sets found by average-linkage clustering.
    #[arg(long)]
    pub clusters: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ReferenceArgs {
    /// `dmu,<column>...` table of published values to compare against. Known
    /// columns: theta, phi_lower, phi, phi_upper, pessimistic, central, optimistic.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Published cross-efficiency matrix to compare against.
    #[arg(long)]
    pub reference_matrix: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CcrArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub reference: ReferenceArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CrosseffArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub grouping: GroupingArgs,
    /// Where to write the matrix; `matrix.csv` next to the report by default.
    #[arg(long)]
    pub matrix_out: Option<PathBuf>,
    #[command(flatten)]
    pub reference: ReferenceArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GameArgs {
    /// Raw DMU data; the matrix is computed first.
    #[arg(long, required_unless_present = "matrix", conflicts_with = "matrix")]
    pub input: Option<PathBuf>,
    /// Cross-efficiency matrix file.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    #[command(flatten)]
    pub grouping: GroupingArgs,
    #[arg(long, value_enum, default_value_t = Convention::Exclude)]
    pub empty_coalition: Convention,
    #[command(flatten)]
    pub reference: ReferenceArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct AllocateArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub revenue: f64,
    #[command(flatten)]
    pub game: GameArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PipelineArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    pub revenue: f64,
    #[command(flatten)]
    pub grouping: GroupingArgs,
    #[arg(long, value_enum, default_value_t = Convention::Exclude)]
    pub empty_coalition: Convention,
    /// Also write the computed matrix to this file.
    #[arg(long)]
    pub matrix_out: Option<PathBuf>,
    #[command(flatten)]
    pub reference: ReferenceArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}
