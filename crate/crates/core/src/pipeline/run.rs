//! Dataset loading and the end-to-end ground-truth run.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{PointCloud, Pose};
use crate::io::{read_imu_csv, read_pcd, read_tum, write_pcd, write_tum, PcdEncoding};
use crate::ndt::{build_grid, track_sequence, TrackResult};
use crate::pipeline::{
    build_prior_map, denoise_map, detect_stationary_segments, integrate_submap, ImuSample,
    MergeEntry, PipelineConfig, PriorMap, Submap, SubmapCache, SubmapSummary, TimeSegment,
};
use crate::registration::incremental_odometry;
use crate::traj::Trajectory;

/// Everything a dataset directory holds.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub spinning: Vec<PointCloud<f64>>,
    pub solid: Vec<PointCloud<f64>>,
    pub imu: Vec<ImuSample>,
    /// External odometry, when `odometry.tum` is present.
    pub odometry: Option<Trajectory>,
}

/// Reads a directory of `NNNN.pcd` scans whose file stems are timestamps
/// in integer milliseconds; name order is time order.
pub fn load_scan_dir(dir: impl AsRef<Path>) -> Result<Vec<PointCloud<f64>>> {
    let dir = dir.as_ref();
    if !dir.is_dir() {
        return Err(Error::MissingInput(dir.to_path_buf()));
    }
    let mut stamped: Vec<(i64, PathBuf)> = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().map(|e| e == "pcd") != Some(true) {
            continue;
        }
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().to_string())
            .unwrap_or_default();
        let ms: i64 = stem.parse().map_err(|_| Error::Parse {
            path: path.display().to_string(),
            msg: "scan file stem must be the timestamp in integer milliseconds".into(),
        })?;
        stamped.push((ms, path));
    }
    if stamped.is_empty() {
        return Err(Error::EmptyInput(format!(
            "no .pcd scans in {}",
            dir.display()
        )));
    }
    stamped.sort_by_key(|(ms, _)| *ms);
    let mut scans = Vec::with_capacity(stamped.len());
    for (ms, path) in stamped {
        scans.push(read_pcd::<f64>(&path)?.with_stamp(ms as f64 / 1000.0));
    }
    Ok(scans)
}

/// Loads the dataset layout written by the simulator (or any producer of
/// the same shape): `scans_spinning/`, `scans_solid/`, `imu.csv`, plus an
/// optional `odometry.tum`.
pub fn load_dataset(dir: impl AsRef<Path>) -> Result<Dataset> {
    let dir = dir.as_ref();
    let spinning = load_scan_dir(dir.join("scans_spinning"))?;
    let solid = load_scan_dir(dir.join("scans_solid"))?;
    let imu = read_imu_csv(dir.join("imu.csv"))?;
    let odometry_path = dir.join("odometry.tum");
    let odometry = if odometry_path.exists() {
        Some(read_tum(&odometry_path)?)
    } else {
        None
    };
    Ok(Dataset {
        spinning,
        solid,
        imu,
        odometry,
    })
}

/// Map-building stage output.
#[derive(Debug, Clone)]
pub struct MapStage {
    pub odometry: Trajectory,
    pub odometry_degraded: usize,
    pub odometry_external: bool,
    pub segments: Vec<TimeSegment>,
    /// Segments that contained no solid-state frames.
    pub segments_without_frames: usize,
    pub submaps: Vec<SubmapSummary>,
    pub prior: PriorMap,
}

/// Runs odometry (or adopts the external file), gates stationary
/// segments, integrates one submap per segment, merges and denoises.
pub fn build_map_stage(dataset: &Dataset, cfg: &PipelineConfig) -> Result<MapStage> {
    cfg.validate()?;
    let (odometry, odometry_degraded, odometry_external) = match &dataset.odometry {
        Some(traj) => (traj.clone(), 0, true),
        None => {
            let res = incremental_odometry(&dataset.spinning, &cfg.odometry)?;
            let degraded = res.degraded.iter().filter(|&&d| d).count();
            (res.trajectory, degraded, false)
        }
    };

    let segments = detect_stationary_segments(&dataset.imu, Some(&odometry), &cfg.thresholds)?;
    if segments.is_empty() {
        return Err(Error::NoStationarySegments);
    }

    let mut submaps: Vec<Submap> = Vec::new();
    let mut segments_without_frames = 0usize;
    for segment in &segments {
        let frames: Vec<PointCloud<f64>> = dataset
            .solid
            .iter()
            .filter(|f| segment.contains(f.stamp))
            .cloned()
            .collect();
        if frames.is_empty() {
            log::warn!(
                "stationary segment [{}, {}] has no solid-state frames",
                segment.t_start,
                segment.t_end
            );
            segments_without_frames += 1;
            continue;
        }
        let mid = 0.5 * (segment.t_start + segment.t_end);
        let pose = nearest_pose(&odometry, mid);
        submaps.push(integrate_submap(&frames)?.with_pose(pose));
    }
    if submaps.is_empty() {
        return Err(Error::InsufficientData(
            "no solid-state frames inside any stationary segment".into(),
        ));
    }
    let summaries: Vec<SubmapSummary> = submaps.iter().map(SubmapSummary::from).collect();

    let cache = SubmapCache::new(submaps)?;
    let prior = denoise_map(&build_prior_map(&cache, cfg)?, cfg)?;

    Ok(MapStage {
        odometry,
        odometry_degraded,
        odometry_external,
        segments,
        segments_without_frames,
        submaps: summaries,
        prior,
    })
}

fn nearest_pose(traj: &Trajectory, t: f64) -> Pose<f64> {
    let poses = traj.poses();
    let hi = poses.partition_point(|p| p.stamp <= t);
    let candidates = [hi.checked_sub(1), (hi < poses.len()).then_some(hi)];
    let mut best = poses[0];
    let mut best_dt = f64::INFINITY;
    for idx in candidates.into_iter().flatten() {
        let dt = (poses[idx].stamp - t).abs();
        if dt < best_dt {
            best_dt = dt;
            best = poses[idx];
        }
    }
    best
}

/// Localization stage: grid the map, track the spinning scans.
pub fn localize_stage(
    map_cloud: &PointCloud<f64>,
    spinning: &[PointCloud<f64>],
    init: &Pose<f64>,
    cfg: &PipelineConfig,
) -> Result<TrackResult> {
    let grid = build_grid(map_cloud, &cfg.ndt)?;
    track_sequence(&grid, spinning, init, &cfg.ndt)
}

/// Data-derived timing of a run (no wall clock: run outputs must be a
/// pure function of inputs).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DataTiming {
    pub dataset_start: f64,
    pub dataset_end: f64,
    pub spinning_frames: usize,
    pub solid_frames: usize,
    pub imu_samples: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub tool_version: String,
    pub config: PipelineConfig,
    pub timing: DataTiming,
    pub odometry_external: bool,
    pub odometry_degraded: usize,
    pub segments: Vec<TimeSegment>,
    pub segments_without_frames: usize,
    pub submaps: Vec<SubmapSummary>,
    pub merge_report: Vec<MergeEntry>,
    pub map_points: usize,
    pub denoise_removed: Option<usize>,
    pub localization_poses: usize,
    pub localization_degraded: usize,
}

/// End-to-end run over a dataset directory. Writes `prior_map.pcd`,
/// `ground_truth.tum`, and `report.json` under `out_dir` and returns the
/// report. Rerunning on identical inputs produces identical bytes.
pub fn generate_ground_truth(
    dataset_dir: impl AsRef<Path>,
    cfg: &PipelineConfig,
    out_dir: impl AsRef<Path>,
) -> Result<RunReport> {
    let dataset = load_dataset(dataset_dir)?;
    let out_dir = out_dir.as_ref();
    fs::create_dir_all(out_dir)?;

    let stage = build_map_stage(&dataset, cfg)?;
    write_pcd(
        &stage.prior.cloud,
        out_dir.join("prior_map.pcd"),
        PcdEncoding::Binary,
    )?;

    let init = *stage
        .odometry
        .first()
        .expect("odometry trajectory is non-empty");
    let track = localize_stage(&stage.prior.cloud, &dataset.spinning, &init, cfg)?;
    write_tum(&track.trajectory, out_dir.join("ground_truth.tum"))?;

    let t0 = dataset.spinning.first().map(|s| s.stamp).unwrap_or(0.0);
    let t1 = dataset.spinning.last().map(|s| s.stamp).unwrap_or(0.0);
    let report = RunReport {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        timing: DataTiming {
            dataset_start: t0,
            dataset_end: t1,
            spinning_frames: dataset.spinning.len(),
            solid_frames: dataset.solid.len(),
            imu_samples: dataset.imu.len(),
        },
        odometry_external: stage.odometry_external,
        odometry_degraded: stage.odometry_degraded,
        segments: stage.segments.clone(),
        segments_without_frames: stage.segments_without_frames,
        submaps: stage.submaps.clone(),
        merge_report: stage.prior.merge_report.clone(),
        map_points: stage.prior.cloud.len(),
        denoise_removed: stage.prior.denoise_removed,
        localization_poses: track.trajectory.len(),
        localization_degraded: track.degraded.iter().filter(|&&d| d).count(),
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    fs::write(out_dir.join("report.json"), json + "\n")?;
    Ok(report)
}
