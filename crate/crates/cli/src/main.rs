//! `cogsec`: regions, condition checks and simulations for the cognitive
//! radio channel with confidential messages.

mod commands;
mod config;
mod error;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cogsec", version, about, long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    Gauss(commands::GaussArgs),
    Figure2(commands::Figure2Args),
    Discrete(commands::DiscreteArgs),
    Check(commands::CheckArgs),
    Simulate(commands::SimulateArgs),
    Verify(commands::VerifyArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gauss(a) => commands::gauss(a),
        Command::Figure2(a) => commands::figure2(a),
        Command::Discrete(a) => commands::discrete(a),
        Command::Check(a) => commands::check(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Verify(a) => commands::verify(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    })
}
