use std::path::PathBuf;

use clap::Parser;
use gtforge_core::error::Result;
use gtforge_core::geom::Pose;
use gtforge_core::io::{read_pcd, read_tum, write_tum};
use gtforge_core::ndt::{build_grid, track_sequence, NdtGrid};
use gtforge_core::pipeline::load_scan_dir;

use crate::config::{merge_into_report, RunConfig};

#[derive(Parser)]
pub struct Args {
    /// Dataset directory (reads scans_spinning/ and odometry.tum if present).
    #[arg(long = "in")]
    input: PathBuf,
    /// Prior map PCD to localize against.
    #[arg(long)]
    map: PathBuf,
    /// Optional grid cache: loaded when the file exists, written after
    /// building otherwise.
    #[arg(long)]
    grid: Option<PathBuf>,
    /// Output ground-truth trajectory (TUM).
    #[arg(long)]
    out: PathBuf,
    /// report.json to extend with the localization section.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

pub fn run(args: Args) -> Result<()> {
    let config = RunConfig::load(args.config.as_deref())?;
    let scans = load_scan_dir(args.input.join("scans_spinning"))?;

    let grid = match &args.grid {
        Some(path) if path.exists() => NdtGrid::<f64>::load_cache(path)?,
        maybe_path => {
            let map = read_pcd::<f64>(&args.map)?;
            let grid = build_grid(&map, &config.pipeline.ndt)?;
            if let Some(path) = maybe_path {
                grid.save_cache(path)?;
            }
            grid
        }
    };

    // The map lives in the odometry frame; with external odometry that
    // frame starts at its first pose, with the built-in odometry at the
    // identity.
    let odometry_path = args.input.join("odometry.tum");
    let init = if odometry_path.exists() {
        *read_tum(&odometry_path)?
            .first()
            .ok_or(gtforge_core::Error::EmptyInput("odometry.tum".into()))?
    } else {
        Pose::identity()
    };

    let track = track_sequence(&grid, &scans, &init, &config.pipeline.ndt)?;
    write_tum(&track.trajectory, &args.out)?;

    let degraded = track.degraded.iter().filter(|&&d| d).count();
    if let Some(report) = &args.report {
        merge_into_report(report, |map| {
            map.insert(
                "localization_poses".into(),
                (track.trajectory.len() as u64).into(),
            );
            map.insert("localization_degraded".into(), (degraded as u64).into());
        })?;
    }
    println!(
        "localized {} scans ({} degraded) against {} cells -> {}",
        track.trajectory.len(),
        degraded,
        grid.len(),
        args.out.display()
    );
    Ok(())
}
