use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

mod commands;
mod config;
mod report;

use config::{Cli, Format, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

fn write_out(cfg: &RunConfig, body: &str) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(body.as_bytes())
            .map_err(|e| CliError::Usage(format!("stdout: {e}"))),
    }
}

fn execute(cli: &Cli) -> Result<bool, CliError> {
    let cfg = RunConfig::resolve(cli.command, &cli.flags)?;
    if let Some(t) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    let start = Instant::now();
    let outcome = commands::run(&cfg)?;
    let json = report::to_json(&outcome.report);
    match cfg.format {
        Format::Json => write_out(&cfg, &json)?,
        Format::Csv => {
            write_out(&cfg, &outcome.csv)?;
            eprint!("{json}");
        }
    }
    eprintln!(
        "{}: {} in {:.3} s on {} threads",
        cfg.command.name(),
        outcome.report.status,
        start.elapsed().as_secs_f64(),
        rayon::current_num_threads()
    );
    Ok(outcome.report.passed())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("tracelab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
