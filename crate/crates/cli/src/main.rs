mod args;
mod commands;
mod error;
mod fixtures;
mod report;

use std::fs;
use std::process::ExitCode;

use clap::Parser;

use args::{merge_config, Cli, Command, Format};
use error::CliError;

fn run(cli: &Cli) -> Result<u8, CliError> {
    let common = cli.command.common();
    if let Some(w) = common.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start {w} workers: {e}")))?;
    }
    let report = commands::run(&cli.command)?;
    let default = match cli.command {
        Command::Census(_) => Format::Csv,
        _ => Format::Json,
    };
    let text = report.render(common.format.unwrap_or(default), !common.no_timestamp)?;
    match &common.output {
        Some(path) => fs::write(path, text).map_err(|e| CliError::io(path, e))?,
        None => print!("{text}"),
    }
    eprintln!("{}: {}", report.command, report.status.label());
    Ok(report.status.exit_code())
}

fn main() -> ExitCode {
    let argv = match merge_config(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
