mod args;
mod commands;
mod context;
mod error;
mod report;

use std::ffi::OsString;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, MeasureCommand};
use context::Context;
use error::{CliError, CliResult, EXIT_USAGE};

fn dispatch(cli: &Cli) -> CliResult<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(error::usage("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Failure(e.to_string()))?;
    }
    let ctx = Context::from_cli(cli)?;
    match &cli.command {
        Command::Measure(MeasureCommand::New(a)) => commands::measure_new(&ctx, a),
        Command::Measure(MeasureCommand::Reflect(a)) => commands::measure_reflect(&ctx, a),
        Command::Analyze(a) => commands::analyze(&ctx, a),
        Command::Conv(a) => commands::conv(&ctx, a),
        Command::Exponents(a) => commands::exponents(a),
        Command::Probe(a) => commands::probe(&ctx, a),
        Command::Sweep(a) => commands::sweep_cmd(&ctx, a),
        Command::Verify(a) => commands::verify(&ctx, a),
        Command::Report(a) => report::report(&ctx, a),
    }
}

fn run(argv: impl IntoIterator<Item = OsString>) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()) as u8)
}
