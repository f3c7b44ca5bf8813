//! Command-line front end: identity verification, integration runs, node
//! dumps and parameter sweeps, with JSON or CSV output.
//!
//! Exit codes: 0 success, 1 configuration or I/O error, 2 tolerance not met,
//! 3 evaluation domain error.

use std::ffi::OsString;

use clap::{Parser, Subcommand};

pub mod config;
pub mod error;
pub mod expr;
pub mod integrate;
pub mod output;
pub mod scheme;
pub mod sweep;
pub mod verify;

use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "zsk", version, about = "Exactly summable series: verification and quadrature", args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check identity suites against their closed-form targets.
    Verify(verify::VerifyArgs),
    /// Integrate an expression over [0, 1) with a logarithmic-node series.
    Integrate(integrate::IntegrateArgs),
    /// Dump the node/weight sequence of a scheme.
    Nodes(integrate::NodesArgs),
    /// Repeat a computation over a parameter grid.
    Sweep(sweep::SweepArgs),
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Verify(a) => verify::run(a),
        Command::Integrate(a) => integrate::run(a),
        Command::Nodes(a) => integrate::run_nodes(a),
        Command::Sweep(a) => sweep::run(a),
    }
}

/// Runs the CLI on raw arguments and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match config::expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("zsk: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("zsk: {e}");
            e.exit_code()
        }
    }
}
