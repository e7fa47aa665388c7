//! `palevim`: ALE-based variable importance for black-box models.

mod compute;
mod export;
mod oracle;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use palevim_core::models::{generate_scenario, write_dataset, Scenario, ScenarioSpec};

#[derive(Parser)]
#[command(name = "palevim", version, about = "Variable importance from accumulated local effects")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute importance values and write a JSON report.
    Compute(Box<compute::ComputeArgs>),
    /// Generate a synthetic dataset as CSV.
    Simulate(SimulateArgs),
    /// Print closed-form importance values for the 3-predictor linear Gaussian model.
    Oracle(oracle::OracleArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario, e.g. `copula4`, `gauss3:rho=0.9`, `segment2`, `iid_uniform:d=3`.
    #[arg(long)]
    scenario: String,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Noise standard deviation; adds a response column `y`.
    #[arg(long)]
    sigma: Option<f64>,
    /// Output file (standard output if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure carrying the process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Self {
        Failure {
            code: 2,
            error: anyhow::anyhow!(msg.into()),
        }
    }
}

impl From<palevim_core::Error> for Failure {
    fn from(e: palevim_core::Error) -> Self {
        use palevim_core::Error as E;
        let code = if e.is_model_protocol() {
            3
        } else {
            match e {
                E::InvalidArgument(_)
                | E::UnknownModel(_)
                | E::ModelParameters { .. }
                | E::UnknownScenario(_)
                | E::NotPositiveDefinite
                | E::MissingResponse
                | E::SchemaMismatch(_) => 2,
                _ => 1,
            }
        };
        Failure {
            code,
            error: e.into(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure { code: 1, error }
    }
}

pub type CliResult<T> = Result<T, Failure>;

fn simulate(args: SimulateArgs) -> CliResult<()> {
    let scenario = Scenario::parse(&args.scenario)?;
    let mut spec = ScenarioSpec::new(scenario, args.n, args.seed);
    if let Some(s) = args.sigma {
        spec = spec.with_sigma(s);
    }
    let data = generate_scenario(&spec)?;
    match args.out {
        Some(path) => {
            let file = std::fs::File::create(&path)
                .map_err(|e| anyhow::anyhow!("cannot create {}: {e}", path.display()))?;
            write_dataset(&data, std::io::BufWriter::new(file))?;
        }
        None => write_dataset(&data, std::io::stdout().lock())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Compute(args) => compute::run(*args),
        Command::Simulate(args) => simulate(args),
        Command::Oracle(args) => oracle::run(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
