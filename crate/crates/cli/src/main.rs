mod config;
mod error;
mod reports;
mod simulate;
mod svg;
mod sweep;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::Scenario;
use error::CliError;

#[derive(Parser)]
#[command(name = "matdelay", version, about = "Predator-prey model with a state-dependent maturation delay")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the scenario; writes a trajectory CSV and an SVG chart.
    Simulate(Common),
    /// Print all equilibria and the reproduction number as JSON.
    Equilibria(Common),
    /// Classify one equilibrium and print the report as JSON.
    Stability {
        #[command(flatten)]
        common: Common,
        /// Equilibrium to classify; defaults to the coexistence point when it
        /// exists, else the predator-free one.
        #[arg(long, value_enum)]
        equilibrium: Option<EqChoice>,
    },
    /// Run the property checks; writes JUnit XML and a CSV of metrics.
    Verify(Common),
    /// Grid over k2, d, tau_m and tau_M; writes a CSV.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the integration horizon.
    #[arg(long)]
    horizon: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum EqChoice {
    Trivial,
    PredatorExtinction,
    Coexistence,
}

impl Common {
    fn load(&self) -> Result<Scenario, CliError> {
        let mut s = config::load(&self.config)?;
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        if let Some(h) = self.horizon {
            if !(h > 0.0 && h.is_finite()) {
                return Err(CliError::Usage(format!("--horizon must be positive, got {h}")));
            }
            s.stepper.t_end = h;
        }
        Ok(s)
    }

    fn out_dir(&self) -> Result<Option<PathBuf>, CliError> {
        if let Some(dir) = &self.out {
            std::fs::create_dir_all(dir)?;
        }
        Ok(self.out.clone())
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(c) => {
            let s = c.load()?;
            simulate::run(&s, &c.out_dir()?.unwrap_or_else(|| ".".into()))
        }
        Command::Equilibria(c) => {
            let s = c.load()?;
            reports::equilibria(&s, c.out_dir()?.as_deref())
        }
        Command::Stability { common, equilibrium } => {
            let s = common.load()?;
            reports::stability(&s, equilibrium, common.out_dir()?.as_deref())
        }
        Command::Verify(c) => {
            let s = c.load()?;
            verify::run(&s, &c.out_dir()?.unwrap_or_else(|| ".".into()))
        }
        Command::Sweep { common, threads } => {
            let s = common.load()?;
            let out = common.out_dir()?.unwrap_or_else(|| ".".into());
            match threads {
                Some(0) => Err(CliError::Usage("--threads must be at least 1".into())),
                Some(n) => rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| CliError::Usage(e.to_string()))?
                    .install(|| sweep::run(&s, &out)),
                None => sweep::run(&s, &out),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("matdelay: {e}");
            e.exit_code()
        }
    }
}
