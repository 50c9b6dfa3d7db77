//! `rof1d`: run scenario files and presets, write CSV/SVG artifacts.

mod output;
mod presets;
mod scenario;
mod svg;
mod tasks;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use output::Report;
use scenario::Scenario;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] rof1d::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use rof1d::Error as E;
        match self {
            CliError::Parse(_) | CliError::Usage(_) => 2,
            CliError::Core(E::InvalidStep(_) | E::InvalidBoundary(_) | E::InvalidLambda(..) | E::InvalidParameter(_)) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "rof1d", version, about = "Exact 1-D ROF minimization and total variation flow")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario file.
    Run {
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write plot.svg.
        #[arg(long)]
        svg: bool,
        /// Run the flow in exact rational arithmetic.
        #[arg(long)]
        rational: bool,
    },
    /// Run a named preset.
    Preset {
        name: String,
        /// Jump height for the four-step presets.
        #[arg(long, default_value_t = 4.0)]
        k: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: bool,
    },
    /// List the presets.
    List,
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = std::io::stdout().write_all(text.as_bytes());
}

fn finish(report: Report, out: &Path, svg: bool, start: Instant) -> Result<u8, CliError> {
    let paths = report.write(out, svg)?;
    let mut text = report.summary_text();
    for (name, child) in &report.children {
        text += &format!("--- {name}\n{}", child.summary_text());
    }
    text += &format!("wall time: {:.3}s\n", start.elapsed().as_secs_f64());
    for p in &paths {
        text += &format!("wrote {}\n", p.display());
    }
    emit(&text);
    let failures = report.failures();
    for f in &failures {
        eprintln!("check failed: {f}");
    }
    Ok(if failures.is_empty() { 0 } else { 1 })
}

fn dispatch(cli: Cli) -> Result<u8, CliError> {
    let start = Instant::now();
    match cli.command {
        Command::List => {
            emit(&presets::listing());
            Ok(0)
        }
        Command::Run { scenario, out, svg, rational } => {
            let text = std::fs::read_to_string(&scenario)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", scenario.display())))?;
            let mut s = Scenario::parse(&text)?;
            s.options.rational |= rational;
            finish(tasks::execute(&s)?, &out, svg, start)
        }
        Command::Preset { name, k, out, svg } => {
            if !k.is_finite() {
                return Err(CliError::Usage(format!("--k must be finite, got {k}")));
            }
            finish(presets::run(&name, k)?, &out, svg, start)
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
