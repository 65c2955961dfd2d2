//! `dpi`: CSV scans of the restricted path-integral model.
//!
//! Exit codes: 0 when every row converged, 1 for usage errors, 2 when a
//! series missed its tail-bound tolerance or a Monte-Carlo run had too few modes.
//! `DPI_THREADS` caps the worker pool.

mod args;
mod commands;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::{usage, CliError};
use output::{write_json, write_table, Document};

const THREADS_VAR: &str = "DPI_THREADS";

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| usage(format!("{THREADS_VAR} = {raw:?}; need a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| usage(format!("{THREADS_VAR}: {e}")))
}

fn quote(arg: String) -> String {
    if arg.is_empty() || arg.contains(|c: char| c.is_whitespace() || c == '\'' || c == '"') {
        format!("'{}'", arg.replace('\'', r"'\''"))
    } else {
        arg
    }
}

/// Lines shared by every output: enough to rerun the command.
fn common_meta(cli: &Cli) -> Vec<(String, String)> {
    let argv: Vec<String> = std::env::args().skip(1).map(quote).collect();
    vec![
        ("dpi".into(), env!("CARGO_PKG_VERSION").into()),
        ("command".into(), format!("dpi {}", argv.join(" "))),
        ("config".into(), format!("{:?}", cli.command)),
        ("tol".into(), format!("{:e}", cli.tol)),
        ("seed".into(), cli.seed.to_string()),
        ("rng".into(), dpi_core::paths::RNG_ALGORITHM.into()),
    ]
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let doc = match &cli.command {
        Command::V2(a) => Document::Csv(commands::v2(a, cli.tol)?),
        Command::Spectrum(a) => Document::Csv(commands::spectrum(a, cli.tol)?),
        Command::Unitarity(a) => Document::Csv(commands::unitarity(a, cli.tol)?),
        Command::Paths(a) => Document::Csv(commands::paths(a, cli.seed)?),
        Command::Commutator(a) => Document::Csv(commands::commutator(a, cli.tol)?),
        Command::Casimir(a) => commands::casimir(a)?,
        Command::Oracle(a) => Document::Csv(commands::oracle(a, cli.tol, cli.seed)?),
    };
    let meta = common_meta(cli);
    match doc {
        Document::Csv(table) => {
            write_table(&table, &meta, cli.out.as_deref(), cli.json.as_deref())?;
            Ok(table.converged)
        }
        Document::Json(value) => {
            if cli.json.is_some() {
                return Err(usage("--json does not apply here; the result is already JSON"));
            }
            write_json(value, &meta, cli.out.as_deref())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Help and version requests are not errors.
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("dpi: {e}");
        return ExitCode::from(e.exit_code());
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("dpi: some rows did not reach the tail-bound tolerance; their partial sums were written");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("dpi: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
