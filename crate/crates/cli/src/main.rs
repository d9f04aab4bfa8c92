//! `runcast`: predict dataflow job runtimes from shared records, plan a
//! cluster, and curate the shared data.
//!
//! Every subcommand is a pure function of its flags, its input files, and
//! `--seed`: identical invocations write identical bytes.

mod cmds;
mod exprs;
mod manifest;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

/// Exit codes: 0 success (or accepted contribution), 1 rejected
/// contribution, 2 input error, 3 no feasible plan.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Infeasible(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Infeasible(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Infeasible(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "runcast",
    version,
    about = "Runtime prediction and cluster sizing for distributed dataflow jobs",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Predict runtimes for one job context across a scale-out range.
    Predict(PredictArgs),
    /// Turn predictions into a costed cluster plan, optionally under a deadline.
    Configure(ConfigureArgs),
    /// Append one observed runtime to a dataset file.
    Record(RecordArgs),
    /// Vet a data contribution before merging it into the shared dataset.
    Validate(ValidateArgs),
    /// Run the standard experiments on the synthetic benchmark jobs.
    Evaluate(EvaluateArgs),
    /// Generate a synthetic dataset with known ground truth.
    Generate(GenerateArgs),
}

#[derive(clap::Args)]
struct PredictArgs {
    /// Runtime records TSV.
    #[arg(long)]
    data: PathBuf,
    /// Job schema file.
    #[arg(long)]
    schema: PathBuf,
    /// Context feature values for the job to predict, comma-separated in
    /// schema order, e.g. "30,0.2,regex".
    #[arg(long)]
    ctx: String,
    /// Scale-outs to predict: "a..b", "a..b,step", or a single value.
    #[arg(long, default_value = "2..12")]
    scaleouts: String,
    /// Machine type to predict for; defaults to the one with most records.
    #[arg(long)]
    machine: Option<String>,
    /// Extra model variants to consider, one "id<TAB>family[<TAB>params]" per line.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Master seed for all randomized steps.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cross-validation split cap (pass 300 for the full-depth evaluation).
    #[arg(long, default_value_t = 50)]
    max_splits: usize,
    /// Optional wall-clock budget for cross-validation. Trades
    /// reproducibility for bounded latency.
    #[arg(long)]
    time_budget_ms: Option<u64>,
    /// Also write the predictions as TSV here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct ConfigureArgs {
    #[command(flatten)]
    predict: PredictArgs,
    /// Machine-type price catalog TSV.
    #[arg(long)]
    prices: PathBuf,
    /// Deadline in milliseconds; omit for pure cost planning.
    #[arg(long)]
    tmax_ms: Option<f64>,
    /// Confidence that the chosen scale-out meets the deadline.
    #[arg(long, default_value_t = 0.95)]
    confidence: f64,
    /// Size of the dataset the job will process, for the memory check.
    #[arg(long)]
    dataset_size_gb: f64,
}

#[derive(clap::Args)]
struct RecordArgs {
    /// Dataset TSV to append to; created with a header if missing.
    #[arg(long)]
    data: PathBuf,
    /// Job schema file.
    #[arg(long)]
    schema: PathBuf,
    /// Machine type of the finished run.
    #[arg(long)]
    machine: String,
    /// Number of machines used.
    #[arg(long)]
    count: u32,
    /// Context feature values, comma-separated in schema order.
    #[arg(long)]
    ctx: String,
    /// Observed gross runtime in milliseconds.
    #[arg(long)]
    runtime_ms: f64,
}

#[derive(clap::Args)]
struct ValidateArgs {
    /// Existing (trusted) dataset TSV.
    #[arg(long)]
    data: PathBuf,
    /// Contributed records TSV, same schema.
    #[arg(long)]
    contribution: PathBuf,
    /// Job schema file.
    #[arg(long)]
    schema: PathBuf,
    /// Tolerated relative growth of held-out MAPE before rejection.
    #[arg(long, default_value_t = 0.10)]
    threshold: f64,
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 50)]
    max_splits: usize,
    #[arg(long)]
    time_budget_ms: Option<u64>,
    /// Also write the verdict as a one-row TSV here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EvalMode {
    /// Local versus globally pooled training data.
    Origin,
    /// Accuracy as a function of training-set size.
    Availability,
}

#[derive(clap::Args)]
struct EvaluateArgs {
    #[arg(long, value_enum)]
    mode: EvalMode,
    /// Jobs to evaluate, comma-separated; defaults to all five.
    #[arg(long)]
    job: Option<String>,
    /// Records generated per job and repetition (origin mode).
    #[arg(long, default_value_t = 200)]
    n: usize,
    /// Held-out records per repetition (availability mode).
    #[arg(long, default_value_t = 20)]
    n_test: usize,
    /// Training-set sizes to sweep (availability mode): "a..b[,step]".
    #[arg(long, default_value = "3..30,3")]
    training_sizes: String,
    /// Repetitions per job.
    #[arg(long, default_value_t = 3)]
    reps: usize,
    /// Relative noise on generated runtimes.
    #[arg(long, default_value_t = 0.02)]
    sigma_rel: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 30)]
    max_splits: usize,
    #[arg(long)]
    time_budget_ms: Option<u64>,
    /// Also write the report TSV here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write per-job plot CSVs into this directory.
    #[arg(long)]
    plot_dir: Option<PathBuf>,
}

#[derive(clap::Args)]
struct GenerateArgs {
    /// Job to synthesize: sort, grep, sgd, kmeans, or pagerank.
    #[arg(long)]
    job: String,
    /// Number of records.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative noise on generated runtimes.
    #[arg(long, default_value_t = 0.02)]
    sigma_rel: f64,
    /// Report single noisy runs instead of the median of five.
    #[arg(long)]
    single_run: bool,
    /// Write the dataset TSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the matching schema file.
    #[arg(long)]
    schema_out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Predict(args) => cmds::predict(&args),
        Command::Configure(args) => cmds::configure(&args),
        Command::Record(args) => cmds::record(&args),
        Command::Validate(args) => cmds::validate(&args),
        Command::Evaluate(args) => cmds::evaluate(&args),
        Command::Generate(args) => cmds::generate(&args),
    };
    let code = match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {}", err.message());
            err.exit_code()
        }
    };
    std::process::exit(code);
}
