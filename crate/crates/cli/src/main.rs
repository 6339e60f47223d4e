// SPDX-License-Identifier: Apache-2.0

#![allow(clippy::neg_cmp_op_on_partial_ord)] // NaN-rejecting comparisons

mod args;
mod commands;
mod error;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use error::exit;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => exit::OK,
                _ => exit::USAGE,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => commands::cmd_solve(a),
        Command::Sweep(a) => commands::cmd_sweep(a),
        Command::Fit(a) => commands::cmd_fit(a),
        Command::Oracle(a) => commands::cmd_oracle(a),
        Command::Materials(a) => commands::cmd_materials(a),
    };
    match result {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            std::process::exit(outcome.code);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.code);
        }
    }
}
