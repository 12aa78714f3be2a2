//! `weightlab` — batch runner for weight-analysis experiments.
//!
//! Exit codes: 0 success, 2 configuration error, 3 analysis failure,
//! 4 I/O failure.  Usage errors from argument parsing also exit 2.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use weightlab_cli::config::{self, ExperimentConfig, RawPair};
use weightlab_cli::report;
use weightlab_cli::run;
use weightlab_core::weight::spec::families;
use weightlab_core::WeightError;

const EXIT_CONFIG: u8 = 2;
const EXIT_ANALYSIS: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(
    name = "weightlab",
    version,
    about = "Numerical toolkit for the harmonic analysis of weights on the line"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        /// Path to a key=value config file.
        config: PathBuf,
    },
    /// Run a one-off experiment described entirely by flags.
    Analyze(Box<AnalyzeArgs>),
    /// List the built-in weight families and their spec syntax.
    Families,
}

/// Flag-for-key mirror of the config file; values use the same syntax and
/// pass through the same validation, so errors read identically.
#[derive(Parser)]
struct AnalyzeArgs {
    /// Weight spec, e.g. power:0:1 (see `weightlab families`).
    #[arg(long)]
    weight: String,
    /// Analysis window as a,b.
    #[arg(long, allow_hyphen_values = true)]
    window: String,
    /// Sampling-grid resolution over the window.
    #[arg(long)]
    cells: String,
    /// Comma-separated analysis list, e.g. bmo,mitsis,ap:2:4.
    #[arg(long)]
    analyses: String,
    /// Scale ladder as lo,hi,count (log-spaced).
    #[arg(long)]
    scales: Option<String>,
    /// Sweep granularity: positions step by scale/divisor.
    #[arg(long)]
    step_divisor: Option<String>,
    /// Cap on sweep positions per scale.
    #[arg(long)]
    max_positions: Option<String>,
    /// Report destination path, or - for stdout.
    #[arg(long)]
    out: Option<String>,
    /// Report format: csv or json.
    #[arg(long)]
    format: Option<String>,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config } => run_file(&config),
        Command::Analyze(args) => match config::build_config(&args.into_pairs()) {
            Ok(cfg) => execute(&cfg),
            Err(e) => {
                eprintln!("config error: {e}");
                ExitCode::from(EXIT_CONFIG)
            }
        },
        Command::Families => {
            print_families();
            ExitCode::SUCCESS
        }
    }
}

fn run_file(path: &Path) -> ExitCode {
    let text = match fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return ExitCode::from(EXIT_IO);
        }
    };
    match config::parse_config(&text) {
        Ok(cfg) => execute(&cfg),
        Err(e) => {
            eprintln!("config error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

fn execute(cfg: &ExperimentConfig) -> ExitCode {
    let outcome = match run::run_experiment(cfg) {
        Ok(outcome) => outcome,
        Err(e) => {
            eprintln!("analysis error: {e}");
            let code = match e {
                WeightError::Io(_) => EXIT_IO,
                _ => EXIT_ANALYSIS,
            };
            return ExitCode::from(code);
        }
    };
    if let Err(e) = report::emit(&outcome.rows, cfg.format, &cfg.out) {
        eprintln!("error: cannot write {}: {e}", cfg.out);
        return ExitCode::from(EXIT_IO);
    }
    if outcome.succeeded() {
        ExitCode::SUCCESS
    } else {
        for (id, err) in &outcome.failures {
            eprintln!("analysis `{id}` failed: {err}");
        }
        ExitCode::from(EXIT_ANALYSIS)
    }
}

fn print_families() {
    for info in families() {
        println!("{:<12} {}", info.name, info.syntax);
        println!("    {}", info.summary);
        println!("    archetype: {}", info.archetype);
        println!();
    }
}

impl AnalyzeArgs {
    /// Key/value pairs on synthetic line 0, validated by the shared
    /// config builder so flag errors match file errors.
    fn into_pairs(self) -> Vec<RawPair> {
        let mut pairs = vec![
            (0, "weight".to_string(), self.weight),
            (0, "window".to_string(), self.window),
            (0, "cells".to_string(), self.cells),
            (0, "analyses".to_string(), self.analyses),
        ];
        for (key, value) in [
            ("scales", self.scales),
            ("step_divisor", self.step_divisor),
            ("max_positions", self.max_positions),
            ("out", self.out),
            ("format", self.format),
        ] {
            if let Some(value) = value {
                pairs.push((0, key.to_string(), value));
            }
        }
        pairs
    }
}
