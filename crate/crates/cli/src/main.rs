//! `multidep`: compute multipartite dependence, reproduce reference tables and run
//! invariant suites.
//!
//! Exit codes: 0 success, 1 a suite or table check failed, 2 unreadable input
//! (spec string, file format, missing file), 3 input that parses but is invalid.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use multidep::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "multidep", version, about = "Multipartite dependence calculator")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,

    /// Trials per randomized check (command-specific default when omitted).
    #[arg(long, global = true)]
    pub trials: Option<usize>,

    /// Override the tolerance of invariant checks.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dependence of one state, e.g. `--state ghz:N=3,d=2` or `--state dmat:@rho.dmat`.
    Compute {
        #[arg(long)]
        state: String,
        /// Report the k-partite dependence (worst k-party marginal) instead.
        #[arg(long)]
        k: Option<usize>,
        /// Apply a KRAUS v1 channel first, as `<party>:@<file>`; repeatable.
        #[arg(long = "apply", value_name = "PARTY:@FILE")]
        apply: Vec<String>,
        /// Skip the density-operator checks when reading DMAT files.
        #[arg(long)]
        no_validate: bool,
    },
    /// Recompute the reference dependence tables and compare cell by cell.
    Table {
        #[arg(long, value_enum, default_value_t = TableChoice::All)]
        which: TableChoice,
    },
    /// Run a named invariant suite, or `all`.
    Verify {
        #[arg(long)]
        suite: String,
    },
    /// Encode, decode and audit random secrets with the share scheme.
    SecretShare {
        /// Share counts to run.
        #[arg(long, value_delimiter = ',', default_values_t = vec![4usize, 6])]
        shares: Vec<usize>,
    },
    /// Compare quantum dependence with the best classical CMI from local measurements.
    MeasureOpt {
        /// Qubit states to examine; defaults to the W state and the 4-qubit Dicke state with one excitation.
        #[arg(long = "state")]
        states: Vec<String>,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableChoice {
    One,
    Two,
    All,
}

/// Command failure, mapped to an exit code.
pub enum Failure {
    Checks,
    Lib(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err((out, failure)) => {
            print!("{out}");
            match failure {
                Failure::Checks => ExitCode::from(1),
                Failure::Usage(msg) => {
                    eprintln!("error: {msg}");
                    ExitCode::from(2)
                }
                Failure::Lib(e) => {
                    eprintln!("error: {e}");
                    match e {
                        Error::Parse { .. } | Error::Io(_) => ExitCode::from(2),
                        _ => ExitCode::from(3),
                    }
                }
            }
        }
    }
}

pub fn parse_apply(arg: &str) -> Result<(usize, PathBuf), Failure> {
    let (party, file) = arg
        .split_once(':')
        .ok_or_else(|| Failure::Usage(format!("`--apply {arg}` is not `<party>:@<file>`")))?;
    let party = party
        .parse()
        .map_err(|_| Failure::Usage(format!("`{party}` is not a party index")))?;
    let file = file
        .strip_prefix('@')
        .ok_or_else(|| Failure::Usage(format!("`{file}` should be `@<file>`")))?;
    Ok((party, PathBuf::from(file)))
}
