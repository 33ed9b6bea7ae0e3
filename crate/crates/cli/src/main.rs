//! `padic-voa`: experiments on the p-adic Heisenberg vertex algebra.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::{CliError, Outcome};
use crate::config::{Config, Settings};

#[derive(Parser, Debug)]
#[command(
    name = "padic-voa",
    version,
    about = "Exact experiments with the p-adic Heisenberg VOA"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default)]
pub struct Global {
    /// Prime p (also accepted as --p)
    #[arg(long = "prime", alias = "p", global = true)]
    pub prime: Option<u64>,
    /// Seed for sampled checks
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Largest weight accepted from state expressions (default 30)
    #[arg(long, global = true)]
    pub degree_cap: Option<u32>,
    /// q-expansion truncation (default 20)
    #[arg(long, global = true)]
    pub qmax: Option<usize>,
    /// TOML file with defaults for the flags above
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Route {
    Matrix,
    Wick,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Ccr,
    Virasoro,
    Translation,
    Grading,
    Normcompat,
    Jacobi,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Z(a) of a state expression, optionally fitted to quasimodular forms
    Zexp {
        #[arg(long)]
        state: String,
        /// Fit on the weight-W monomials in E2, E4, E6
        #[arg(long)]
        fit: Option<u32>,
        #[arg(long, value_enum, default_value = "matrix")]
        route: Route,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Eisenstein series E_k, or E_k^* modulo p^m from a Kummer chain
    Eisenstein {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        star: bool,
        /// Comma-separated chain weights (default: generated from k)
        #[arg(long)]
        chain: Option<String>,
        /// Exponent m of the modulus p^m for --star
        #[arg(long, default_value_t = 2)]
        precision: u32,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Kummer chain gaps and the limiting weight
    Kummer {
        #[arg(long)]
        start: u32,
        #[arg(long)]
        steps: usize,
    },
    /// Jacobi identity on seeded random triples
    JacobiCheck {
        #[arg(long, default_value_t = 6)]
        degree: u32,
        #[arg(long, default_value_t = 3)]
        window: i64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Exact axiom suites
    Axioms {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long)]
        degree: u32,
        /// Mode bound |m|, |n| for ccr and virasoro
        #[arg(long)]
        bound: Option<i64>,
        #[arg(long, default_value_t = 500)]
        samples: usize,
    },
    /// Mode-wise norms 1/|m - lambda| of the L(0) resolvent
    Resolvent {
        /// Rational n/d or digits ...d_k...d_0
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, default_value_t = 30)]
        mmax: u64,
    },
    /// L[0] eigen-residuals of a state family against lambda
    EigenVerify {
        #[arg(long)]
        rho: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long)]
        family: PathBuf,
    },
    /// Write an Eisenstein-matched family h[-1]h[-(k-1)]1 / c_k
    EigenFamily {
        #[arg(long)]
        rho: String,
        /// Comma-separated weights
        #[arg(long)]
        weights: String,
        /// Keep Z(a_k) = E_k instead of rescaling to R-norm in [1, p)
        #[arg(long)]
        raw: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Two-mode bracket states h[-a]h[-b]1 whose Z-image is a multiple of E_k
    EisensteinSearch {
        #[arg(long)]
        k: u32,
        /// Largest mode index b scanned
        #[arg(long)]
        degree: u32,
        /// Chain of weights whose matched states are compared with E_k^*
        #[arg(long)]
        chain: Option<String>,
        #[arg(long, default_value_t = 2)]
        precision: u32,
    },
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let file = match &cli.global.config {
        Some(path) => Config::load(path).map_err(CliError::Usage)?,
        None => Config::default(),
    };
    let settings = Settings::merge(&cli.global, file);
    commands::dispatch(cli.command, &settings)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            return commands::report_error(&CliError::Usage(
                e.kind().to_string() + ": " + &e.to_string(),
            ));
        }
    };
    match run(cli) {
        Ok(outcome) => outcome.emit(),
        Err(e) => commands::report_error(&e),
    }
}
