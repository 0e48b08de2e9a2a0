//! `amplab`: scenario runner for resolvent sign experiments.
//!
//! Subcommands: `scalar` (sign sweep of the scalar resolvent), `delta`
//! (empirical validity intervals and the ratio-constant table), `system`
//! (coupled 2x2 solves, pattern verification, finite-difference
//! cross-checks), `counterexample` (the fixed reference scenario) and
//! `selftest` (seeded property sweeps).
//!
//! Exit codes: 0 success, 2 configuration error, 3 resonance, 4 ratio
//! estimate undefined (every member cap-bound), 5 hypothesis violation under
//! `--require-hypotheses`.

mod commands;
mod config;
mod output;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Parser, Subcommand};

use amp_core::AmpError;

#[derive(Parser, Debug)]
#[command(name = "amplab", version, about = "Resolvent sign-analysis laboratory")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Truncation length used when the tool generates expansions.
    #[arg(long, global = true)]
    modes: Option<usize>,

    /// Evaluation grid points per axis.
    #[arg(long, global = true)]
    grid: Option<usize>,

    /// Relative sign tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Output directory for reports and tables.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Cross-check spectral solves against the finite-difference oracle on
    /// an n-point grid.
    #[arg(long, global = true)]
    oracle: Option<usize>,

    /// Fail (exit 5) when the requested pattern's hypotheses do not hold.
    #[arg(long, global = true)]
    require_hypotheses: bool,

    /// Seed for the randomized sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep the scalar resolvent over mu and classify the solution sign.
    Scalar {
        /// Scenario JSON (fields: domain, h, sweep, grid, tol).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Forcing coefficients, comma separated (overrides the file).
        #[arg(long, value_delimiter = ',')]
        h: Option<Vec<f64>>,
        /// Sweep as start:stop:step (overrides the file).
        #[arg(long, value_parser = config::SweepRange::parse_flag)]
        sweep: Option<config::SweepRange>,
    },
    /// Measure empirical validity intervals for a forcing family and
    /// estimate the ratio constant.
    Delta {
        /// Scenario JSON (fields: domain, family | family_s, lambda_cap, q,
        /// scan_step, bisection_tol).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Shorthand family: principal mode plus s times the second mode.
        #[arg(long, value_delimiter = ',')]
        family_s: Option<Vec<f64>>,
        /// Search ceiling above the principal eigenvalue.
        #[arg(long)]
        lambda_cap: Option<f64>,
    },
    /// Solve the coupled system, optionally verifying a sign pattern.
    System {
        /// Scenario JSON (fields: domain, coupling, mu | mu_rule, f,
        /// g | g_rule, theorem, sweep, k_sweep).
        #[arg(long)]
        scenario: PathBuf,
        /// Gain for the g_rule (overrides the file).
        #[arg(long)]
        k: Option<f64>,
        /// Proportionality constant for the hypothesis window budget.
        #[arg(long)]
        budget_k: Option<f64>,
        /// Randomly search for maximum-principle failures with nonnegative
        /// forcing, a < d and mu < mu_1^- (no weighted-gap condition).
        #[arg(long, value_name = "COUNT")]
        search_mp: Option<usize>,
    },
    /// Reproduce the fixed reference counterexample.
    Counterexample {
        /// Part 1 sweeps the gain k; part 2 the offset eps.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        part: u8,
        /// Gains (part 1) or offsets (part 2) to evaluate.
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
    },
    /// Run the seeded property sweeps and print one line per check.
    Selftest,
}

#[derive(Debug)]
pub struct Failure {
    code: i32,
    message: String,
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Failure {}

pub fn fail(code: i32, message: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(Failure {
        code,
        message: message.into(),
    })
}

fn exit_code(err: &anyhow::Error) -> i32 {
    if let Some(f) = err.downcast_ref::<Failure>() {
        return f.code;
    }
    if let Some(amp) = err.downcast_ref::<AmpError>() {
        return match amp {
            AmpError::Resonance { .. }
            | AmpError::SystemResonance { .. }
            | AmpError::DiscreteResonance { .. } => 3,
            AmpError::AllCapBound => 4,
            _ => 2,
        };
    }
    2
}

/// Run settings shared by every command.
#[derive(Debug, Clone)]
pub struct Globals {
    pub modes: Option<usize>,
    pub grid: Option<usize>,
    pub tol: Option<f64>,
    pub out: PathBuf,
    pub oracle: Option<usize>,
    pub require_hypotheses: bool,
    pub seed: u64,
}

fn run(cli: Cli) -> Result<()> {
    let globals = Globals {
        modes: cli.modes,
        grid: cli.grid,
        tol: cli.tol,
        out: cli.out,
        oracle: cli.oracle,
        require_hypotheses: cli.require_hypotheses,
        seed: cli.seed,
    };
    std::fs::create_dir_all(&globals.out)?;
    match cli.command {
        Command::Scalar { config, h, sweep } => commands::scalar::run(&globals, config, h, sweep),
        Command::Delta {
            config,
            family_s,
            lambda_cap,
        } => commands::delta::run(&globals, config, family_s, lambda_cap),
        Command::System {
            scenario,
            k,
            budget_k,
            search_mp,
        } => commands::system::run(&globals, &scenario, k, budget_k, search_mp),
        Command::Counterexample { part, values } => {
            commands::counterexample::run(&globals, part, values)
        }
        Command::Selftest => commands::selftest::run(&globals),
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(exit_code(&err));
        }
    }
}
