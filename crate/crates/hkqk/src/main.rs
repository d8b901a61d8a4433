use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hkqk::catalog;
use hkqk::pipeline::{self, ModelConfig};
use hkqk::verify::Mode;
use hkqk::Error;

#[derive(Parser)]
#[command(name = "hkqk", version, about = "Verify hyperKahler structures, their twists and the quaternionic Kahler correspondence")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification pipeline on a model parameter file.
    Verify {
        config: PathBuf,
        #[arg(long)]
        mode: Option<Mode>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print every check name with its anchor.
    ListChecks {
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the chart of a model as JSON.
    DumpModel {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), ExitCode> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| {
            eprintln!("error: cannot write {}: {e}", p.display());
            ExitCode::from(1)
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(path: &Path) -> Result<ModelConfig, ExitCode> {
    let src = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        ExitCode::from(2)
    })?;
    ModelConfig::from_json(&src).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })
}

fn failure(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        Error::Parse(_) | Error::InvalidParams(_) => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn run(cli: Cli) -> Result<ExitCode, ExitCode> {
    match cli.command {
        Command::Verify { config, mode, samples, seed, format, out } => {
            let mut cfg = load(&config)?;
            if let Some(m) = mode {
                cfg.mode = m;
            }
            if let Some(n) = samples {
                cfg.samples = n;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let report = pipeline::run(&cfg).map_err(|e| failure(&e))?;
            let text = match format {
                Format::Text => report.to_text(),
                Format::Json => report.to_json() + "\n",
            };
            emit(&text, out.as_deref())?;
            Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::ListChecks { format, out } => {
            let text = match format {
                Format::Text => catalog::list(),
                Format::Json => {
                    let v: Vec<_> = catalog::CHECKS.iter().map(|c| serde_json::json!({ "name": c.name, "anchor": c.anchor })).collect();
                    serde_json::to_string_pretty(&v).expect("catalog serializes") + "\n"
                }
            };
            emit(&text, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::DumpModel { config, out } => {
            let cfg = load(&config)?;
            let chart = pipeline::build_chart(&cfg).map_err(|e| failure(&e))?;
            emit(&(chart.to_json() + "\n"), out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(c) | Err(c) => c,
    }
}
