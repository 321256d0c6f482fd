use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use velopaoi_cli::validate::{exit_code, write_table};
use velopaoi_cli::{
    run_correlation, run_handover_check, run_joint, run_meta, run_paoi, Budget, CliError, Command, CurvePair,
    Scenario, Validator,
};

#[derive(Parser)]
#[command(name = "velopaoi", version, about = "Velocity-dependent reliability and peak age of information")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Meta distribution of the conditional success probability.
    Meta(Common),
    /// Correlation of the success probability at two instants, against velocity.
    Correlation(Common),
    /// Joint success probability at two instants, against velocity.
    Joint {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        gamma0: Option<f64>,
        #[arg(long)]
        gamma1: Option<f64>,
    },
    /// Percentile of the peak age of information, against velocity.
    Paoi {
        #[command(flatten)]
        common: Common,
        /// Percentile in (0, 1).
        #[arg(long)]
        percentile: Option<f64>,
    },
    /// Runs the acceptance suite and prints a pass/fail table.
    Validate {
        /// Meta-distribution trials; the other budgets scale with it.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Also write the table to this CSV file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Accepted for symmetry with the other subcommands; the suite fixes
        /// its own scenarios.
        #[arg(long)]
        scenario: Option<String>,
    },
    /// Handover probability over one interval: analysis against geometric Monte Carlo.
    HandoverCheck(Common),
}

#[derive(Args)]
struct Common {
    /// Preset name (ground, suburban, urban, dense-urban, highrise) or TOML file.
    #[arg(long, default_value = "suburban")]
    scenario: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Output stem; writes <out>_analysis.csv and <out>_simulation.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated velocities, m per unit time.
    #[arg(long, value_delimiter = ',')]
    velocities: Option<Vec<f64>>,
    /// SINR threshold in dB.
    #[arg(long, allow_hyphen_values = true)]
    threshold_db: Option<f64>,
}

impl Common {
    fn scenario(&self, command: Command) -> Result<Scenario, CliError> {
        let mut s = Scenario::resolve(&self.scenario, command)?;
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        if let Some(trials) = self.trials {
            s.trials = trials;
        }
        if let Some(out) = &self.out {
            s.out = out.clone();
        }
        if let Some(v) = &self.velocities {
            s.velocities = v.clone();
        }
        if let Some(db) = self.threshold_db {
            s.theta_db = db;
        }
        s.sync();
        s.check()?;
        Ok(s)
    }
}

fn finish(pair: CurvePair, s: &Scenario) -> Result<(), CliError> {
    let [a, b] = pair.write(&s.out)?;
    println!("wrote {} and {}", a.display(), b.display());
    println!("max deviation {} (tolerance {})", pair.deviation, pair.tolerance);
    if pair.passed() {
        Ok(())
    } else {
        Err(CliError::Tolerance(format!("deviation {} exceeds {}", pair.deviation, pair.tolerance)))
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Sub::Meta(c) => {
            let s = c.scenario(Command::Meta)?;
            finish(run_meta(&s)?, &s)?;
        }
        Sub::Correlation(c) => {
            let s = c.scenario(Command::Correlation)?;
            finish(run_correlation(&s)?, &s)?;
        }
        Sub::Joint { common, gamma0, gamma1 } => {
            let mut s = common.scenario(Command::Joint)?;
            s.gamma0 = gamma0.unwrap_or(s.gamma0);
            s.gamma1 = gamma1.unwrap_or(s.gamma1);
            s.check()?;
            finish(run_joint(&s, s.gamma0, s.gamma1)?, &s)?;
        }
        Sub::Paoi { common, percentile } => {
            let mut s = common.scenario(Command::Paoi)?;
            s.percentile = percentile.unwrap_or(s.percentile);
            s.check()?;
            finish(run_paoi(&s, s.percentile)?, &s)?;
        }
        Sub::HandoverCheck(c) => {
            let s = c.scenario(Command::HandoverCheck)?;
            finish(run_handover_check(&s)?, &s)?;
        }
        Sub::Validate { trials, seed, out, scenario: _ } => {
            let mut budget = Budget::default();
            if let Some(n) = trials {
                budget = budget.with_meta_trials(n);
            }
            if let Some(seed) = seed {
                budget.seed = seed;
            }
            let validator = Validator::new(budget);
            let reports = validator.run_all();
            write_table(&reports, std::io::stdout().lock())?;
            if let Some(path) = out {
                let file = std::fs::File::create(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                write_table(&reports, file)?;
            }
            return Ok(exit_code(&reports));
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let code = match Cli::try_parse() {
        Ok(cli) => match run(cli) {
            Ok(code) => code,
            Err(e) => {
                eprintln!("error: {e}");
                e.exit_code()
            }
        },
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                2
            } else {
                0
            }
        }
    };
    ExitCode::from(code as u8)
}
