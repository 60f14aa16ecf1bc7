mod args;
mod commands;
mod input;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

const EXIT_FAILURE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_DIVERGENCE: u8 = 3;

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<input::InputError>().is_some() {
        return EXIT_INPUT;
    }
    match err.downcast_ref::<kg_galerkin::Error>() {
        Some(kg_galerkin::Error::Divergence { .. }) => EXIT_DIVERGENCE,
        Some(_) => EXIT_INPUT,
        None => EXIT_FAILURE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Stationary(a) => commands::stationary(a),
        Command::Evolve(a) => commands::evolve(a),
        Command::Critical(a) => commands::critical(a),
        Command::Residual(a) => commands::residual(a),
        Command::Tensor(a) => commands::tensor(a),
        Command::Landscape(a) => commands::landscape(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
