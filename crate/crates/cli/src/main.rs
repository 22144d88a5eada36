// `!(x > t)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;

use args::{Cli, Command};
use clap::Parser;
use faddeev_core::QuadratureSpec;
use std::io::Write;
use std::process::ExitCode;

/// Exit codes: 1 verification failure, 2 invalid configuration, 3 numerical failure.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

fn run(cli: &Cli) -> Result<commands::Output, CliError> {
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(CliError::Config("--workers must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Numeric(e.to_string()))?;
    }
    if !(cli.rel_tol > 0.0 && cli.abs_tol >= 0.0) {
        return Err(CliError::Config("tolerances must be positive".into()));
    }
    let spec = QuadratureSpec {
        rel_tol: cli.rel_tol,
        abs_tol: cli.abs_tol,
        ..QuadratureSpec::default()
    };
    match &cli.command {
        Command::Eval(a) => commands::eval(a, cli.format, spec),
        Command::Green(a) => commands::green(a, cli.format, spec),
        Command::Curves(a) => commands::curves(a, cli.format, spec),
        Command::Figures(a) => commands::figures(a, cli.format, spec),
        Command::Converge(a) => commands::converge(a, cli.format, spec),
        Command::Verify(a) => commands::verify(a, cli.format, spec),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match run(&cli) {
        Ok(out) => out,
        Err(e) => {
            let (CliError::Config(msg) | CliError::Numeric(msg)) = &e;
            eprintln!("error: {msg}");
            return ExitCode::from(e.code());
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &out.body),
        None => std::io::stdout().lock().write_all(&out.body),
    };
    if let Err(e) = written {
        eprintln!("error: writing output: {e}");
        return ExitCode::from(3);
    }
    if out.failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
