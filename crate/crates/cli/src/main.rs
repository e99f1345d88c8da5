//! `cox`: command-line front end for `cox-core`.
//!
//! Every subcommand writes its outputs and a `manifest.json` into `--out`.
//! Exit codes: 0 success, 1 verification failure, 2 invalid or irregular
//! parameters, 3 infeasible inversion or fit.

mod args;
mod cmd;
mod config;
mod exit;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Potential(a) => cmd::potential::run(&cli, a),
        Command::Spectrum(a) => cmd::spectrum::run(&cli, a),
        Command::Invert(a) => cmd::invert::run(&cli, a),
        Command::Observables(a) => cmd::observables::run(&cli, a),
        Command::Feshbach(a) => cmd::feshbach::run(&cli, a),
        Command::Verify(a) => cmd::verify::run(&cli, a),
        Command::Atlas(a) => cmd::atlas::run(&cli, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = exit::code_of(&e);
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}
