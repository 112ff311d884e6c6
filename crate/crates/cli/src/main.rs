mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Hyperelastic potential discovery: data generation, gated pre-training,
/// polyconvexity checks, validation and full-field calibration.
#[derive(Debug, Parser)]
#[command(name = "hyperdisc", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Seed for every random draw of the run.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// TOML file overriding the default configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory receiving all outputs.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Latin-hypercube invariant cloud and spread-out triplet selection.
    Sample,
    /// Label triplets with an analytic material and write canonical curves.
    GenData(commands::GenDataArgs),
    /// Train a gated network potential and extract its pruned closed form.
    Pretrain(commands::PretrainArgs),
    /// Evaluate the polyconvexity indicator of a model on data points.
    Indicator(commands::IndicatorArgs),
    /// Compare a model with a reference material in canonical and uniaxial tests.
    Validate(commands::ValidateArgs),
    /// Generate the specimen mesh.
    Mesh,
    /// Simulate a full-field experiment with a reference material.
    SynthDic(commands::SynthDicArgs),
    /// Calibrate model parameters against a full-field dataset.
    Transfer(commands::TransferArgs),
    /// Collate the results found in a run directory.
    Report(commands::ReportArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
