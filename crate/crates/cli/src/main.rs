//! Batch front end for the simulator and the validation suites.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod output;
mod simulate;
mod tables;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "diracsim", version, about = "Dirac-Hartree field with classical nuclei: runs, checks and tables")]
struct Cli {
    /// Root directory for all outputs.
    #[arg(long, global = true, env = "DIRACSIM_OUTPUT", default_value = "diracsim-output")]
    output: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a coupled simulation from a TOML config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run inequality and estimate suites and write JSONL reports.
    Validate {
        #[arg(long, value_enum)]
        suite: validate::Suite,
        /// Grid points per axis.
        #[arg(long, default_value_t = 32)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Ground-state regularity classification table.
    Groundstate {
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        nu: Vec<f64>,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        sigma: Vec<f64>,
        /// Decay rate; defaults to each nu.
        #[arg(long)]
        a: Option<f64>,
    },
    /// Self-convergence of the propagator under slice refinement.
    Convergence {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = [64usize, 128, 256])]
        ladder: Vec<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate { config } => simulate::run(&cli.output, config),
        Command::Validate { suite, n, seed } => validate::run(&cli.output, *suite, *n, *seed),
        Command::Groundstate { nu, sigma, a } => tables::groundstate(&cli.output, nu, sigma, *a),
        Command::Convergence { config, ladder } => tables::convergence(&cli.output, config, ladder),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.record());
            ExitCode::from(f.code())
        }
    }
}
