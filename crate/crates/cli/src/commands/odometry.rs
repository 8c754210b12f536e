use std::path::PathBuf;

use clap::Parser;
use gtforge_core::error::Result;
use gtforge_core::io::write_tum;
use gtforge_core::pipeline::load_scan_dir;
use gtforge_core::registration::incremental_odometry;

use crate::config::RunConfig;

#[derive(Parser)]
pub struct Args {
    /// Dataset directory (reads scans_spinning/).
    #[arg(long = "in")]
    input: PathBuf,
    /// Output trajectory in TUM format.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
}

pub fn run(args: Args) -> Result<()> {
    let config = RunConfig::load(args.config.as_deref())?;
    let scans = load_scan_dir(args.input.join("scans_spinning"))?;
    let result = incremental_odometry(&scans, &config.pipeline.odometry)?;
    write_tum(&result.trajectory, &args.out)?;
    let degraded = result.degraded.iter().filter(|&&d| d).count();
    println!(
        "odometry: {} poses ({} degraded) -> {}",
        result.trajectory.len(),
        degraded,
        args.out.display()
    );
    Ok(())
}
