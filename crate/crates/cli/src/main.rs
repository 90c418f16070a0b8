#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod cli;
mod commands;
mod config;
mod error;
mod manifest;
mod parse;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    // clap exits with status 2 on malformed flags
    let args = cli::Cli::parse();
    match commands::dispatch(args.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("urn: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
