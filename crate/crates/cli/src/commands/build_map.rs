use std::path::PathBuf;

use clap::Parser;
use gtforge_core::error::Result;
use gtforge_core::io::{write_pcd, PcdEncoding};
use gtforge_core::pipeline::{build_map_stage, load_dataset};

use crate::config::{merge_into_report, to_json_value, RunConfig};

#[derive(Parser)]
pub struct Args {
    /// Dataset directory (scans_spinning/, scans_solid/, imu.csv,
    /// optional odometry.tum).
    #[arg(long = "in")]
    input: PathBuf,
    /// Output directory for prior_map.pcd and report.json.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
}

pub fn run(args: Args) -> Result<()> {
    let config = RunConfig::load(args.config.as_deref())?;
    let dataset = load_dataset(&args.input)?;
    let stage = build_map_stage(&dataset, &config.pipeline)?;

    std::fs::create_dir_all(&args.out)?;
    let map_path = args.out.join("prior_map.pcd");
    write_pcd(&stage.prior.cloud, &map_path, PcdEncoding::Binary)?;

    let t0 = dataset.spinning.first().map(|s| s.stamp).unwrap_or(0.0);
    let t1 = dataset.spinning.last().map(|s| s.stamp).unwrap_or(0.0);
    merge_into_report(&args.out.join("report.json"), |report| {
        report.insert("tool_version".into(), env!("CARGO_PKG_VERSION").into());
        report.insert("config".into(), to_json_value(&config));
        report.insert(
            "timing".into(),
            serde_json::json!({
                "dataset_start": t0,
                "dataset_end": t1,
                "spinning_frames": dataset.spinning.len(),
                "solid_frames": dataset.solid.len(),
                "imu_samples": dataset.imu.len(),
            }),
        );
        report.insert("odometry_external".into(), stage.odometry_external.into());
        report.insert(
            "odometry_degraded".into(),
            (stage.odometry_degraded as u64).into(),
        );
        report.insert("segments".into(), to_json_value(&stage.segments));
        report.insert(
            "segments_without_frames".into(),
            (stage.segments_without_frames as u64).into(),
        );
        report.insert("submaps".into(), to_json_value(&stage.submaps));
        report.insert(
            "merge_report".into(),
            to_json_value(&stage.prior.merge_report),
        );
        report.insert("map_points".into(), (stage.prior.cloud.len() as u64).into());
        report.insert(
            "denoise_removed".into(),
            to_json_value(&stage.prior.denoise_removed),
        );
    })?;

    let merged = stage.prior.merge_report.iter().filter(|e| e.merged).count();
    println!(
        "prior map: {} points from {}/{} submaps ({} segments) -> {}",
        stage.prior.cloud.len(),
        merged,
        stage.submaps.len(),
        stage.segments.len(),
        map_path.display()
    );
    Ok(())
}
