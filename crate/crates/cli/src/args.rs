//! Command-line arguments.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tight_storage_core::cases::{Case, DataSource};
use tight_storage_core::Family;

#[derive(Debug, Parser)]
#[command(name = "tight-storage", version, about = "Build, solve and certify storage scheduling models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the storage model of one family as JSON.
    Build(BuildArgs),
    /// Solve a model file by exact LP or branch and bound.
    Solve(SolveArgs),
    /// Certify that the tight one-period LP is the convex hull of the
    /// charging and discharging sets.
    Certify(CertifyArgs),
    /// Derive the tight operation rows from the basic ones step by step.
    Replay(ReplayArgs),
    /// Run a bundled case study.
    Case(CaseArgs),
    /// Compare the reserve the basic and flexible reserve models grant at a
    /// fixed schedule.
    Flex(FlexArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Md,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ArithmeticArg {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TirRowsArg {
    Corrected,
    Original,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitialArg {
    Fixed,
    Variable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BranchingArg {
    MostFractional,
    FirstFractional,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output format.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse()
}

fn parse_case(s: &str) -> Result<Case, String> {
    s.parse()
}

fn parse_data(s: &str) -> Result<DataSource, String> {
    s.parse()
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// bo, to, bor, tor, bir, tir or bof.
    #[arg(value_parser = parse_family)]
    pub family: Family,
    /// Storage parameter JSON file.
    #[arg(long)]
    pub params: PathBuf,
    /// Number of periods.
    #[arg(short = 'T', long = "horizon", default_value_t = 1)]
    pub horizon: usize,
    /// Drop every binary mark.
    #[arg(long)]
    pub relax: bool,
    /// Whether the state of charge before the first period is a fixed
    /// parameter or a variable.
    #[arg(long, value_enum, default_value_t = InitialArg::Fixed)]
    pub initial: InitialArg,
    /// Minimum total up reserve in every period.
    #[arg(long)]
    pub reserve_up: Option<String>,
    /// Minimum total down reserve in every period.
    #[arg(long)]
    pub reserve_down: Option<String>,
    /// Energy rows of the tight investment family.
    #[arg(long, value_enum, default_value_t = TirRowsArg::Corrected)]
    pub tir_rows: TirRowsArg,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Model JSON file as written by `build`.
    pub model: PathBuf,
    /// Maximum number of branch-and-bound nodes.
    #[arg(long)]
    pub node_limit: Option<u64>,
    #[arg(long, value_enum, default_value_t = ArithmeticArg::Exact)]
    pub arithmetic: ArithmeticArg,
    #[arg(long, value_enum, default_value_t = BranchingArg::MostFractional)]
    pub branching: BranchingArg,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// A family with a tight counterpart: bo, to, bor, tor, bir or tir.
    #[arg(value_parser = parse_family)]
    pub family: Family,
    /// Storage parameter JSON file.
    #[arg(long, conflicts_with = "random", required_unless_present = "random")]
    pub params: Option<PathBuf>,
    /// Certify this many random valid parameter sets.
    #[arg(long, requires = "seed")]
    pub random: Option<usize>,
    /// Seed of the random parameter sets.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = TirRowsArg::Corrected)]
    pub tir_rows: TirRowsArg,
    /// Certify even when the parameters break the validity rules.
    #[arg(long)]
    pub no_validate: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// Storage parameter JSON file.
    #[arg(long)]
    pub params: PathBuf,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct CaseArgs {
    /// uc, uc-reserves, tep or multiperiod.
    #[arg(value_parser = parse_case)]
    pub case: Case,
    /// Data set: paper-faithful or approximated.
    #[arg(long, value_parser = parse_data, default_value = "approximated")]
    pub data: DataSource,
    #[arg(long, value_enum, default_value_t = ArithmeticArg::Exact)]
    pub arithmetic: ArithmeticArg,
    #[arg(long)]
    pub node_limit: Option<u64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct FlexArgs {
    /// Storage parameter JSON file.
    #[arg(long)]
    pub params: PathBuf,
    /// State of charge before the period.
    #[arg(long)]
    pub soc: String,
    /// Scheduled charge power.
    #[arg(long, default_value = "0")]
    pub pc: String,
    /// Scheduled discharge power.
    #[arg(long, default_value = "0")]
    pub pd: String,
    #[command(flatten)]
    pub output: Output,
}
