use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::parse;

#[derive(Debug, Parser)]
#[command(name = "urn", version, about = "Balls-in-bins with power-law feedback")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the discrete urn model and snapshot the counts.
    SimulateDiscrete(DiscreteArgs),
    /// Simulate independent agents in continuous time and keep the losers.
    SimulateLosers(LosersArgs),
    /// Solve the master equation for the transient mass function.
    SolveMaster(MasterArgs),
    /// Fit a power law or an exponential to a column of samples.
    Fit(FitArgs),
    /// Regular-variation diagnostic of the first-term shape.
    Regvar(RegvarArgs),
    /// Largest gap between two tail curves on a window.
    CompareTails(CompareArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON file with default values for this command's flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory [default: $URN_OUT_DIR or .]
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Stem for output file names [default: the subcommand name]
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Debug, Args)]
pub struct Feedback {
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Feedback scale [default: 1]
    #[arg(long)]
    pub eta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DiscreteArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub feedback: Feedback,
    /// Number of agents.
    #[arg(long = "N", value_parser = parse::count)]
    pub n: Option<u64>,
    /// Comma-separated iteration numbers to snapshot at.
    #[arg(long, value_parser = parse::count_list)]
    pub checkpoints: Option<parse::Counts>,
    /// [default: 0]
    #[arg(long, value_parser = parse::count)]
    pub seed: Option<u64>,
    /// Independent runs, replica k on RNG substream k [default: 1]
    #[arg(long, value_parser = parse::count)]
    pub replicas: Option<u64>,
    /// Worker threads for replicas, 0 for all cores [default: 0]
    #[arg(long, value_parser = parse::count)]
    pub parallel: Option<u64>,
    /// Allow checkpoints beyond 1e8 iterations.
    #[arg(long)]
    pub unbounded: bool,
}

#[derive(Debug, Args)]
pub struct LosersArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub feedback: Feedback,
    /// Starting count of every agent [default: 1]
    #[arg(long, value_parser = parse::count)]
    pub omega0: Option<u64>,
    /// [default: 10000]
    #[arg(long, value_parser = parse::count)]
    pub n_sims: Option<u64>,
    /// Ball cap; reaching it counts as exploding [default: 10000]
    #[arg(long, value_parser = parse::count)]
    pub omega_max: Option<u64>,
    /// Time cap, or `auto` for the first-explosion time scale [default: auto]
    #[arg(long = "tM")]
    pub t_m: Option<String>,
    /// [default: 0]
    #[arg(long, value_parser = parse::count)]
    pub seed: Option<u64>,
    /// Worker threads, 0 for all cores [default: 0]
    #[arg(long, value_parser = parse::count)]
    pub parallel: Option<u64>,
}

#[derive(Debug, Args)]
pub struct MasterArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub feedback: Feedback,
    /// [default: 1]
    #[arg(long, value_parser = parse::count)]
    pub omega0: Option<u64>,
    /// Times as start:stop:step or a comma list [default: 1:5:0.5]
    #[arg(long, value_parser = parse::time_grid)]
    pub t: Option<parse::Times>,
    /// [default: 300]
    #[arg(long, value_parser = parse::count)]
    pub omega_max: Option<u64>,
    /// Add first-term approximation columns and predicted tails.
    #[arg(long)]
    pub approx: bool,
    /// Also write the recursion coefficients.
    #[arg(long)]
    pub dump_coeffs: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitMode {
    PowerLaw,
    Exponential,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub common: Common,
    /// CSV file with a header row.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Column to fit [default: the first]
    #[arg(long)]
    pub column: Option<String>,
    /// [default: power-law]
    #[arg(long, value_enum)]
    pub mode: Option<FitMode>,
    /// Lower cutoff of the power-law tail.
    #[arg(long)]
    pub xmin: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RegvarArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// [default: 1]
    #[arg(long, value_parser = parse::count)]
    pub omega0: Option<u64>,
    /// [default: 1e2,1e3,1e4]
    #[arg(long, value_parser = parse::count_list)]
    pub omega_grid: Option<parse::Counts>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: Common,
    /// Tail CSV with columns omega,tail_prob.
    #[arg(long)]
    pub a: Option<PathBuf>,
    #[arg(long)]
    pub b: Option<PathBuf>,
    /// [default: where both curves are defined]
    #[arg(long)]
    pub lo: Option<f64>,
    /// [default: inf]
    #[arg(long)]
    pub hi: Option<f64>,
}
