mod commands;
mod labels;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Two-community detection with standardized edge-count statistics.
#[derive(Parser)]
#[command(name = "edgecount", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a graph and report the detected split as JSON.
    Detect(DetectArgs),
    /// Run replicates on planted-partition graphs and write CSV.
    Simulate(SimulateArgs),
    /// Misclassification rate between two label files.
    Eval(EvalArgs),
    /// Edge-count statistics of a fixed labelling as JSON.
    Moments(MomentsArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
pub struct Direction {
    #[arg(long)]
    pub directed: bool,
    #[arg(long)]
    pub undirected: bool,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Auto,
    ZwMax,
    ZwMin,
    Zd,
    Modularity,
    Qd,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum CriterionArg {
    Penalized,
    GammaTau,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ModelArg {
    Sbm,
    Dcsbm,
}

#[derive(Args)]
pub struct DetectArgs {
    /// Edge list, one `u v` pair per line.
    #[arg(long)]
    pub edges: PathBuf,
    #[command(flatten)]
    pub direction: Direction,
    #[arg(long, value_enum, default_value = "auto")]
    pub method: MethodArg,
    #[arg(long, value_enum, default_value = "penalized")]
    pub criterion: CriterionArg,
    #[arg(long, default_value_t = 0.12)]
    pub lambda: f64,
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Label file or a previous JSON report; starts the first restart.
    #[arg(long)]
    pub warm_start: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value = "sbm")]
    pub model: ModelArg,
    #[arg(long)]
    pub p11: f64,
    #[arg(long)]
    pub p12: f64,
    /// Defaults to `--p12`.
    #[arg(long)]
    pub p21: Option<f64>,
    #[arg(long)]
    pub p22: f64,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    /// const, pareto:SHAPE, uniform:LOW or exp:RATE.
    #[arg(long, default_value = "const")]
    pub theta: String,
    #[command(flatten)]
    pub direction: Direction,
    #[arg(long, default_value_t = 50)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "penalized")]
    pub criterion: CriterionArg,
    #[arg(long, default_value_t = 0.12)]
    pub lambda: f64,
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    /// Worker threads, 0 for all cores.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub truth: PathBuf,
    #[arg(long)]
    pub est: PathBuf,
}

#[derive(Args)]
pub struct MomentsArgs {
    #[arg(long)]
    pub edges: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    #[command(flatten)]
    pub direction: Direction,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
    Degenerate(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Input(_) => 3,
            CliError::Degenerate(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Input(m) | CliError::Degenerate(m) => f.write_str(m),
        }
    }
}

impl From<edgecount::Error> for CliError {
    fn from(e: edgecount::Error) -> Self {
        use edgecount::Error as E;
        let msg = e.to_string();
        match e {
            E::AllDegenerate => CliError::Degenerate(msg),
            E::InvalidParameter(_) => CliError::Usage(msg),
            _ => CliError::Input(msg),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Detect(a) => commands::detect(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Eval(a) => commands::eval(a),
        Command::Moments(a) => commands::moments(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("edgecount: {e}");
            ExitCode::from(e.code())
        }
    }
}
