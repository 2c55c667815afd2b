use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fedsvdd_cli::commands::{cmd_generate_data, cmd_inspect_partition, cmd_run};
use fedsvdd_cli::config::{parse_config, Mode, Overrides};
use fedsvdd_cli::{CliError, EXIT_CONFIG, EXIT_OK, EXIT_PARTIAL};

/// Federated anomaly-detection simulator and experiment runner.
#[derive(Parser)]
#[command(name = "fedsvdd", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment grid and write report files.
    Run(RunArgs),
    /// Show how a dataset would be split across clients.
    InspectPartition(InspectArgs),
    /// Generate a synthetic benchmark CSV.
    GenerateData(GenerateArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML configuration file (flags below override it).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for report.csv, report_detail.json and diff_*.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Global seed (replaces the config's seed list).
    #[arg(long)]
    seed: Option<u64>,
    /// Parallel workers over grid cells.
    #[arg(long)]
    workers: Option<usize>,
    /// Comma-separated dataset CSV paths.
    #[arg(long, value_delimiter = ',')]
    datasets: Option<Vec<String>>,
    /// Comma-separated algorithms: ocsvm, svdd, esvdd, sve.
    #[arg(long, value_delimiter = ',')]
    algorithms: Option<Vec<String>>,
    /// Experimental design: plasticity or generalization.
    #[arg(long)]
    mode: Option<String>,
    /// Comma-separated client counts.
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<usize>>,
    /// Comma-separated client fractions.
    #[arg(long, value_delimiter = ',')]
    f: Option<Vec<f64>>,
    /// Comma-separated split schemes: iid, biased.
    #[arg(long, value_delimiter = ',')]
    schemes: Option<Vec<String>>,
    /// Comma-separated anonymisation arms: true, false.
    #[arg(long, value_delimiter = ',')]
    anonymise: Option<Vec<bool>>,
    /// Hyperparameter draws per cell.
    #[arg(long)]
    hyper_samples: Option<usize>,
}

#[derive(Args)]
struct InspectArgs {
    /// Dataset CSV to partition.
    #[arg(long)]
    dataset: PathBuf,
    /// Number of clients.
    #[arg(long)]
    k: usize,
    /// Split scheme: iid or biased.
    #[arg(long, default_value = "iid")]
    scheme: String,
    /// Partition seed.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output directory for the partition JSON dump.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 300)]
    n_normal: usize,
    #[arg(long, default_value_t = 30)]
    n_anomaly: usize,
    #[arg(long, default_value_t = 4)]
    dimensions: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run(args) => run(args),
        Command::InspectPartition(args) => inspect(args),
        Command::GenerateData(args) => generate(args),
    };
    match code {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG as u8)
        }
    }
}

fn run(args: RunArgs) -> Result<i32, CliError> {
    let mode = args.mode.as_deref().map(str::parse::<Mode>).transpose()?;
    let overrides = Overrides {
        datasets: args.datasets,
        algorithms: args.algorithms,
        mode,
        k: args.k,
        f: args.f,
        schemes: args.schemes,
        anonymise: args.anonymise,
        hyper_samples: args.hyper_samples,
        seed: args.seed,
        out_dir: args.out,
        workers: args.workers,
    };
    let config = parse_config(args.config.as_deref(), &overrides)?;
    let failed = cmd_run(&config)?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_PARTIAL })
}

fn inspect(args: InspectArgs) -> Result<i32, CliError> {
    let scheme = args
        .scheme
        .parse()
        .map_err(|e| CliError::Config(format!("--scheme: {e}")))?;
    cmd_inspect_partition(&args.dataset, args.k, scheme, args.seed, &args.out)?;
    Ok(EXIT_OK)
}

fn generate(args: GenerateArgs) -> Result<i32, CliError> {
    cmd_generate_data(
        args.n_normal,
        args.n_anomaly,
        args.dimensions,
        args.seed,
        &args.out,
    )?;
    Ok(EXIT_OK)
}
