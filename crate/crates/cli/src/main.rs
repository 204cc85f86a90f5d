//! Command-line front end for the pickup-detection pipeline.
//!
//! Subcommands mirror the pipeline stages: `synth` writes a labeled dataset,
//! `render` turns a recording into movie frames, `train` fits the classifier,
//! `detect` localizes pickups in one recording, `eval` runs the
//! cross-validated benchmark, and `report` re-renders its outputs.
//!
//! Exit codes: 0 success, 1 usage error, 2 data/IO error, 3 model/config
//! mismatch.

mod commands;
mod config;
mod error;
mod manifest;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "imu-movie", version, about = "Detect floor pickups in dual-ankle IMU recordings")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Master seed; overrides the config file's `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides the config file's `out_dir`.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a seeded synthetic dataset (manifest + CSVs).
    Synth,
    /// Render movie frames for one recording.
    Render(commands::render::RenderArgs),
    /// Train the classifier and write a checkpoint.
    Train(commands::train::TrainArgs),
    /// Run leave-one-subject-out cross-validation.
    Eval(commands::eval::EvalArgs),
    /// Detect pickup events in one recording using a checkpoint.
    Detect(commands::detect::DetectArgs),
    /// Re-render reports from an existing records file.
    Report(commands::report::ReportArgs),
}

/// Settings shared by every subcommand, resolved from flags + config file.
pub struct Ctx {
    pub config: RunConfig,
    pub seed: Option<u64>,
    pub out: PathBuf,
}

fn build_ctx(cli: &Cli) -> Result<Ctx, CliError> {
    let config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let out = cli
        .out
        .clone()
        .or_else(|| config.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    Ok(Ctx { config, seed: cli.seed, out })
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let ctx = build_ctx(cli)?;
    match &cli.command {
        Command::Synth => commands::synth::run(&ctx),
        Command::Render(args) => commands::render::run(&ctx, args),
        Command::Train(args) => commands::train::run(&ctx, args),
        Command::Eval(args) => commands::eval::run(&ctx, args),
        Command::Detect(args) => commands::detect::run(&ctx, args),
        Command::Report(args) => commands::report::run(&ctx, args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version land here too; only real mistakes are errors.
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
