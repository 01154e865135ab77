//! `rdad`: generate samples, build filtrations on a grid, compute cubical
//! persistence and bootstrap significance, writing plot-ready files.

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::Bbox;

#[derive(Debug, Parser)]
#[command(name = "rdad", version, about)]
struct Cli {
    /// Root seed for all randomness; drawn from entropy and printed when omitted.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for field evaluation and bootstrap replicates.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Flat `key = value` file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for all artifacts.
    #[arg(long, global = true, default_value = "rdad-out")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a synthetic dataset into points.csv.
    Generate(GenerateArgs),
    /// Evaluate a filtration function on a grid into field.json and field.csv.
    Field(FieldCmd),
    /// Cubical persistence of a field into diagram.csv.
    Persist(PersistCmd),
    /// Bootstrap confidence radius into bootstrap.json and significant.csv.
    Bootstrap(BootstrapCmd),
    /// Crop a coordinate table to a bounding box into points.csv.
    Ingest(IngestCmd),
    /// generate (or read points), field, persist and bootstrap in one go.
    Run(RunCmd),
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// Dataset family: two-square or voronoi.
    family: String,
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Clone, Debug, Default, Args)]
struct FieldArgs {
    /// Filtration: distance, dtm, dad or rdad.
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    k_dtm: Option<usize>,
    #[arg(long)]
    k_den: Option<usize>,
    #[arg(long)]
    m_dtm: Option<f64>,
    /// Grid spacing; defaults to the preset's, else 0.02.
    #[arg(long)]
    delta_x: Option<f64>,
    /// Bounding-box padding per side, as a fraction of the extent.
    #[arg(long)]
    padding: Option<f64>,
    /// Explicit grid rectangle xmin,ymin,xmax,ymax.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<Bbox>,
    /// Preset supplying grid spacing, grid rectangle and generator.
    #[arg(long)]
    preset: Option<String>,
    /// Perturb points by up to 1e-9 of the bounding-box diagonal first.
    #[arg(long)]
    jitter: bool,
}

#[derive(Clone, Debug, Default, Args)]
struct EngineArgs {
    /// Coefficient field characteristic.
    #[arg(long)]
    prime: Option<u32>,
    /// Persistence engine: reduction or union-find.
    #[arg(long)]
    engine: Option<String>,
}

#[derive(Clone, Debug, Default, Args)]
struct BootArgs {
    /// subsample or oracle.
    #[arg(long)]
    mode: Option<String>,
    /// Number of bootstrap replicates.
    #[arg(short = 'B', long = "replicates")]
    replicates: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Homology dimension used for the bottleneck distance.
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Debug, Args)]
struct FieldCmd {
    /// Points CSV; defaults to points.csv in the output directory.
    #[arg(long)]
    points: Option<PathBuf>,
    #[command(flatten)]
    field: FieldArgs,
}

#[derive(Debug, Args)]
struct PersistCmd {
    /// Field JSON; defaults to field.json in the output directory.
    #[arg(long)]
    field: Option<PathBuf>,
    #[command(flatten)]
    engine: EngineArgs,
    /// Add death_i,death_j pixel index columns.
    #[arg(long)]
    indices: bool,
}

#[derive(Debug, Args)]
struct BootstrapCmd {
    #[arg(long)]
    points: Option<PathBuf>,
    #[command(flatten)]
    field: FieldArgs,
    #[command(flatten)]
    engine: EngineArgs,
    #[command(flatten)]
    boot: BootArgs,
}

#[derive(Debug, Args)]
struct IngestCmd {
    /// Input table with a header row.
    #[arg(long)]
    input: PathBuf,
    /// Closed box xmin,ymin,xmax,ymax; defaults to the preset's grid rectangle.
    #[arg(long, allow_hyphen_values = true)]
    bbox: Option<Bbox>,
    #[arg(long, default_value = "x")]
    x_column: String,
    #[arg(long, default_value = "y")]
    y_column: String,
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Debug, Args)]
struct RunCmd {
    /// Points CSV; when omitted the preset's generator supplies the sample.
    #[arg(long)]
    points: Option<PathBuf>,
    #[command(flatten)]
    field: FieldArgs,
    #[command(flatten)]
    engine: EngineArgs,
    #[command(flatten)]
    boot: BootArgs,
    #[arg(long)]
    indices: bool,
}

#[derive(Debug)]
pub enum CliError {
    Core(rdad::Error),
    Config(String),
    Data(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use rdad::ErrorClass;
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Core(e) => match e.class() {
                ErrorClass::Config => 2,
                ErrorClass::Data => 3,
                ErrorClass::Numerical => 4,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
        }
    }
}

impl From<rdad::Error> for CliError {
    fn from(e: rdad::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .format_target(false)
        .init();
    let cli = Cli::parse();
    match commands::dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
