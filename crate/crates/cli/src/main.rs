//! `okun`: batch front end for break detection, piecewise Okun fits,
//! prediction, synthetic data and source audits.

mod args;
mod commands;
mod config;
mod report;

use std::process::ExitCode;

use clap::Parser;
use okun_core::{Error, ErrorClass};

use args::{Cli, Command};
use config::RunConfig;

fn exit_code(class: ErrorClass) -> u8 {
    match class {
        ErrorClass::Contract => 2,
        ErrorClass::Infeasible => 3,
        ErrorClass::Io => 4,
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    cli.command.apply(&mut cfg);
    match cli.command {
        Command::Validate(_) => commands::validate::run(&cfg),
        Command::Detect(_) => commands::detect::run(&cfg),
        Command::Fit(_) => commands::fit::run(&cfg),
        Command::Predict(_) => commands::predict::run(&cfg),
        Command::Audit(_) => commands::audit::run(&cfg),
        Command::Synth(_) => commands::synth::run(&cfg),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(e.class()))
        }
    }
}
