use std::path::PathBuf;

use clap::Parser;
use gtforge_core::error::Result;
use gtforge_core::sim::{export_dataset, Scene};

use crate::commands::scripts;
use crate::config::RunConfig;

#[derive(Parser)]
pub struct Args {
    /// Scene preset: room_10x8x3, corridor_40m, open_road, forest.
    #[arg(long)]
    preset: String,
    /// Motion script: tour (default) or stationary.
    #[arg(long, default_value = "tour")]
    script: String,
    /// Duration in seconds (stationary script only).
    #[arg(long)]
    duration: Option<f64>,
    /// RNG seed; identical seeds reproduce the dataset byte for byte.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output dataset directory.
    #[arg(long)]
    out: PathBuf,
    /// JSON run configuration (sensor rig section applies here).
    #[arg(long)]
    config: Option<PathBuf>,
}

pub fn run(args: Args) -> Result<()> {
    let config = RunConfig::load(args.config.as_deref())?;
    let scene = Scene::preset(&args.preset)?;
    let script = scripts::canonical(&args.preset, &args.script, args.duration)?;
    let manifest = export_dataset(&scene, &script, &config.rig, args.seed, &args.out)?;
    println!(
        "dataset {}: {} spinning frames, {} solid frames, {} imu samples, {} stops",
        args.out.display(),
        manifest.spinning_frames,
        manifest.solid_frames,
        manifest.imu_samples,
        manifest.script.stop_windows.len(),
    );
    Ok(())
}
