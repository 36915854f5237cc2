use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qspoof::{config, inspect, rates, sweep, CliError};

/// Adversarial quantum hypothesis testing on the radar spoofing scenario.
#[derive(Parser)]
#[command(name = "qspoof", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a scenario config and echo it with defaults resolved.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Evaluate every (n, lambda) grid point and write the CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit per-lambda error exponents from a sweep CSV.
    Rates {
        #[arg(long)]
        input: PathBuf,
        /// Also write the fits as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dump the clean and attacked states at one grid point as JSON.
    AttackInspect {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        lambda: f64,
        /// Write to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a sweep CSV as a log-scale SVG chart.
    #[cfg(feature = "plot")]
    Plot {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn write_file(path: &PathBuf, contents: &[u8]) -> qspoof::Result<()> {
    std::fs::write(path, contents).map_err(|source| CliError::Io { path: path.clone(), source })
}

fn run(cli: Cli) -> qspoof::Result<()> {
    match cli.command {
        Command::Validate { config: path } => {
            let cfg = config::load(&path)?;
            for w in config::validate(&cfg)? {
                eprintln!("warning: {w}");
            }
            println!("{}", serde_json::to_string_pretty(&cfg)?);
        }
        Command::Sweep { config: path, out } => {
            let cfg = config::load(&path)?;
            for w in cfg.validate()? {
                eprintln!("warning: {w}");
            }
            let result = sweep::run_to_file(&cfg, &out)?;
            if !result.skipped.is_empty() {
                eprintln!(
                    "warning: {} grid points skipped, see {}",
                    result.skipped.len(),
                    sweep::warnings_path(&out).display()
                );
            }
        }
        Command::Rates { input, out } => {
            let fits = rates::report(&sweep::read_csv(&input)?)?;
            print!("{}", rates::render_text(&fits));
            if let Some(out) = out {
                let mut buf = Vec::new();
                rates::write_csv(&fits, &mut buf)?;
                write_file(&out, &buf)?;
            }
        }
        Command::AttackInspect { config: path, n, lambda, out } => {
            let cfg = config::load(&path)?;
            let mut text = serde_json::to_string_pretty(&inspect::inspect(&cfg, n, lambda)?)?;
            text.push('\n');
            match out {
                Some(out) => write_file(&out, text.as_bytes())?,
                None => std::io::stdout()
                    .write_all(text.as_bytes())
                    .map_err(|source| CliError::Io { path: "<stdout>".into(), source })?,
            }
        }
        #[cfg(feature = "plot")]
        Command::Plot { input, out } => {
            let svg = qspoof::plot::render(&sweep::read_csv(&input)?)?;
            write_file(&out, svg.as_bytes())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
