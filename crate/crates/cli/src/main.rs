//! `gtforge`: lidar ground-truth pipeline front end.
//!
//! Exit codes: 0 success, 2 usage/configuration errors, 3 data errors,
//! 4 numerical failures. Verbosity via the `GTFORGE_LOG` env var
//! (`error`, `warn`, `info`, `debug`).

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gtforge_core::error::ErrorClass;

#[derive(Parser)]
#[command(
    name = "gtforge",
    version,
    about = "SLAM-assisted ground-truth maps, NDT localization, trajectory evaluation, and a synthetic lidar simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic multi-modal lidar dataset with exact truth.
    Simulate(commands::simulate::Args),
    /// Run scan-to-map incremental odometry over a dataset's spinning scans.
    Odometry(commands::odometry::Args),
    /// Build the denoised prior map from IMU-gated stationary submaps.
    BuildMap(commands::build_map::Args),
    /// Localize the spinning scans against a prior map (NDT).
    Localize(commands::localize::Args),
    /// Absolute position error of an estimate against a reference.
    Eval(commands::eval::Args),
    /// Run a command while sampling its CPU and memory use.
    Monitor(commands::monitor::Args),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("GTFORGE_LOG")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => commands::simulate::run(args),
        Command::Odometry(args) => commands::odometry::run(args),
        Command::BuildMap(args) => commands::build_map::run(args),
        Command::Localize(args) => commands::localize::run(args),
        Command::Eval(args) => commands::eval::run(args),
        Command::Monitor(args) => commands::monitor::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.kind());
            match e.class() {
                ErrorClass::Usage => ExitCode::from(2),
                ErrorClass::Data => ExitCode::from(3),
                ErrorClass::Numerical => ExitCode::from(4),
            }
        }
    }
}
