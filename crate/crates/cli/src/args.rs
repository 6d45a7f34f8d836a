use clap::{Args, Parser, Subcommand, ValueEnum};
use soc_auction::analytics::DEFAULT_B;
use soc_auction::Rule;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "soc-auction",
    version,
    about = "Highest-remaining-bid auction simulator and analytics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one auction and write its event log and summary.
    Simulate(SimulateArgs),
    /// Large-N predictions for a price law.
    Theory(TheoryArgs),
    /// Segment one run into avalanches and fit the survival tail.
    Avalanches(AvalancheArgs),
    /// Reproduce the data behind a figure with its canonical configuration.
    Replicate(ReplicateArgs),
    /// Run replicas and estimate p_c, b, a_f and TI normality.
    Estimate(EstimateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Price law, e.g. `lognormal:mu=0,sigma=0.3`.
    #[arg(long, default_value = "lognormal:mu=0,sigma=0.3")]
    pub model: String,
    /// Reserve price; wraps the model in `truncated:base=<price>`.
    #[arg(long)]
    pub base_price: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value = "classic")]
    pub rule: Rule,
    /// Number of bids.
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    #[arg(long, env = "SOC_AUCTION_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Critical level F(x_c).
    #[arg(long, default_value_t = soc_auction::DEFAULT_PC)]
    pub pc: f64,
    /// One price per line; replaces the sampled prices.
    #[arg(long)]
    pub prices_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "csv,json")]
    pub format: Vec<Format>,
}

impl OutputArgs {
    pub fn csv(&self) -> bool {
        self.format.contains(&Format::Csv)
    }

    pub fn json(&self) -> bool {
        self.format.contains(&Format::Json)
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Attach Poisson arrival times with this rate to the event log.
    #[arg(long)]
    pub arrival_rate: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TheoryArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = soc_auction::DEFAULT_PC)]
    pub pc: f64,
    /// Sale-count variance constant used by the a_f approximation.
    #[arg(long, default_value_t = DEFAULT_B)]
    pub b: f64,
    /// Also write theory.json into this directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AvalancheArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, default_value_t = 100)]
    pub kmin: u64,
    #[arg(long, default_value_t = 10_000)]
    pub kmax: u64,
    /// Bootstrap resamples for the slope standard error.
    #[arg(long, default_value_t = 200)]
    pub bootstrap: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    Fig1a,
    Fig1b,
    Fig2,
}

#[derive(Debug, Args)]
pub struct ReplicateArgs {
    #[arg(value_enum)]
    pub figure: Figure,
    #[arg(long, env = "SOC_AUCTION_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value = "classic")]
    pub rule: Rule,
    /// Bid counts; three or more enable the b estimate.
    #[arg(long, value_delimiter = ',', default_value = "10000", value_parser = clap::value_parser!(u64).range(1..))]
    pub n: Vec<u64>,
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    pub replicas: u64,
    #[arg(long, env = "SOC_AUCTION_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    #[arg(long, default_value_t = 1000)]
    pub bootstrap: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}
