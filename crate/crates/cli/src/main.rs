mod analyze;
mod bounds;
mod common;
mod generate;
mod metrics;
mod svd;

use clap::{ArgAction, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

use common::Failure;

/// Cyclic community structure in directed graphs via complex spectral
/// embeddings.
#[derive(Parser)]
#[command(name = "cyclescope", version, about)]
struct Cli {
    /// Increase log verbosity (-v info, -vv debug)
    #[arg(short, long, action = ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a block model and write its edge list and ground truth
    Generate(GenerateArgs),
    /// Locate eigenpairs near roots of unity, embed, and group vertices
    Analyze(AnalyzeArgs),
    /// Score a run's groups against generator ground truth
    Metrics(MetricsArgs),
    /// Evaluate spectral recovery bounds on a sample with ground truth
    Bounds(BoundsArgs),
    /// Singular-value baseline on the degree-scaled adjacency
    Svd(SvdArgs),
}

#[derive(clap::Args)]
struct GenerateArgs {
    /// pure3cyclic[:group_size[:rho]], hidden3cyclic[:q_ext], mixedcycles,
    /// or a path to a JSON block model
    spec: String,
    /// Output prefix; a trailing slash puts files under that directory
    /// named after the spec
    out: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SideArg {
    Left,
    Right,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum HalfArg {
    Left,
    Right,
}

#[derive(clap::Args)]
struct AnalyzeArgs {
    /// Edge list (TSV) or Matrix Market file
    graph: PathBuf,
    /// Root of unity p/q to target; repeat for several targets
    #[arg(long = "target", value_name = "P/Q", default_value = "1/3")]
    targets: Vec<String>,
    #[arg(long, value_enum, default_value_t = SideArg::Both)]
    side: SideArg,
    /// Residual certification bound
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Largest dimension solved densely
    #[arg(long, default_value_t = 4000)]
    dense_threshold: usize,
    /// Cluster by density with this radius instead of by sector
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, default_value_t = 5)]
    min_pts: usize,
    /// Sector noise cutoff as a fraction of the largest magnitude
    #[arg(long, default_value_t = 0.25)]
    mag_threshold: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Drop self-loops while reading instead of failing
    #[arg(long)]
    drop_self_loops: bool,
    /// Highest-magnitude vertices reported per group
    #[arg(long, default_value_t = 10)]
    seeds_per_group: usize,
    /// Output prefix for the run document and coordinate CSVs
    #[arg(long, default_value = "run")]
    out: String,
}

#[derive(clap::Args)]
struct MetricsArgs {
    /// Ground truth document written by generate
    #[arg(long)]
    truth: PathBuf,
    /// Run document written by analyze
    #[arg(long)]
    run: PathBuf,
    /// Write the metrics document here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct BoundsArgs {
    /// Edge list (TSV) or Matrix Market file
    graph: PathBuf,
    /// Ground truth document written by generate
    #[arg(long)]
    truth: PathBuf,
    #[arg(long, value_name = "P/Q", default_value = "1/3")]
    target: String,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 4000)]
    dense_threshold: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    drop_self_loops: bool,
    /// Write the bounds document here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SvdArgs {
    /// Edge list (TSV) or Matrix Market file
    graph: PathBuf,
    /// Number of leading singular triplets to compute
    #[arg(long, default_value_t = 25)]
    rank: usize,
    /// Coordinate columns for the planar projection, e.g. 3,4
    #[arg(long, value_name = "A,B", default_value = "0,1")]
    dims: String,
    #[arg(long, value_enum, default_value_t = HalfArg::Left)]
    side: HalfArg,
    #[arg(long, default_value_t = 4000)]
    dense_threshold: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    drop_self_loops: bool,
    /// Cluster the projection by density with this radius
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, default_value_t = 5)]
    min_pts: usize,
    /// Output prefix for coordinate and singular-value files
    #[arg(long, default_value = "svd")]
    out: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let default_level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(default_level))
        .format_timestamp(None)
        .init();

    let result = match cli.command {
        Command::Generate(args) => generate::run(args),
        Command::Analyze(args) => analyze::run(args),
        Command::Metrics(args) => metrics::run(args),
        Command::Bounds(args) => bounds::run(args),
        Command::Svd(args) => svd::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {:#}", failure.error());
            // 2 marks a solver that did not certify, 3 bad input.
            ExitCode::from(match failure {
                Failure::Convergence(_) => 2u8,
                Failure::Input(_) => 3u8,
            })
        }
    }
}
