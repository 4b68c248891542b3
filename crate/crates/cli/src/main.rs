mod args;
mod commands;
mod config;
mod error;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Extract(a) => commands::extract(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Analyze(a) => commands::analyze_cmd(a),
        Command::Report(a) => commands::report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("swb: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
