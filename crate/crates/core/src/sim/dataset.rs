//! Dataset export: the on-disk layout the ground-truth pipeline consumes,
//! plus exact truth for evaluation.
//!
//! Layout under the output directory:
//!
//! ```text
//! scans_spinning/NNNNNNNNN.pcd   # file stem = stamp in milliseconds
//! scans_solid/NNNNNNNNN.pcd
//! imu.csv                        # t,ax,ay,az,gx,gy,gz
//! truth.tum                      # exact poses at spinning-scan stamps
//! manifest.json                  # seed, rig, scene, script summary
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Pose;
use crate::io::{write_imu_csv, write_pcd, write_tum, PcdEncoding};
use crate::sim::{
    simulate_solid_state_scan, simulate_spinning_scan, synthesize_imu, MotionScript, Scene,
    SensorKind, SensorSpec,
};
use crate::traj::Trajectory;

/// The sensors mounted on the simulated platform. Both lidars share the
/// platform body frame (co-located, identity extrinsics).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorRig {
    pub spinning: SensorSpec,
    pub solid_state: SensorSpec,
    pub imu_rate_hz: f64,
    pub imu_noise_accel: f64,
    pub imu_noise_gyro: f64,
}

impl Default for SensorRig {
    fn default() -> Self {
        SensorRig {
            spinning: SensorSpec::vlp16(),
            solid_state: SensorSpec::avia(),
            imu_rate_hz: 100.0,
            imu_noise_accel: 0.002,
            imu_noise_gyro: 0.002,
        }
    }
}

impl SensorRig {
    pub fn validate(&self) -> Result<()> {
        self.spinning.validate()?;
        self.solid_state.validate()?;
        if self.spinning.kind != SensorKind::Spinning {
            return Err(Error::InvalidArgument(
                "rig.spinning must be a spinning sensor".into(),
            ));
        }
        if self.solid_state.kind != SensorKind::SolidState {
            return Err(Error::InvalidArgument(
                "rig.solid_state must be a solid-state sensor".into(),
            ));
        }
        if self.imu_noise_accel < 0.0 || self.imu_noise_gyro < 0.0 {
            return Err(Error::InvalidArgument("imu noise must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScriptSummary {
    pub t_start: f64,
    pub t_end: f64,
    pub waypoint_count: usize,
    pub stop_windows: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub format: String,
    pub version: u32,
    pub seed: u64,
    pub scene: String,
    pub rig: SensorRig,
    pub script: ScriptSummary,
    pub spinning_frames: usize,
    pub solid_frames: usize,
    pub imu_samples: usize,
}

/// Paths of everything written.
#[derive(Debug, Clone)]
pub struct DatasetPaths {
    pub root: PathBuf,
    pub spinning_dir: PathBuf,
    pub solid_dir: PathBuf,
    pub imu_csv: PathBuf,
    pub truth_tum: PathBuf,
    pub manifest_json: PathBuf,
}

impl DatasetPaths {
    pub fn under(root: impl Into<PathBuf>) -> Self {
        let root = root.into();
        DatasetPaths {
            spinning_dir: root.join("scans_spinning"),
            solid_dir: root.join("scans_solid"),
            imu_csv: root.join("imu.csv"),
            truth_tum: root.join("truth.tum"),
            manifest_json: root.join("manifest.json"),
            root,
        }
    }
}

fn frame_period_ms(rate_hz: f64, what: &str) -> Result<i64> {
    let period = 1000.0 / rate_hz;
    if (period - period.round()).abs() > 1e-9 || period < 1.0 {
        return Err(Error::InvalidArgument(format!(
            "{what} rate {rate_hz} Hz does not give an integer millisecond period"
        )));
    }
    Ok(period.round() as i64)
}

/// Frame stamps in integer milliseconds over the script span.
fn frame_stamps_ms(script: &MotionScript, rate_hz: f64, what: &str) -> Result<Vec<i64>> {
    let period = frame_period_ms(rate_hz, what)?;
    let (t0, t1) = script.time_span();
    let start = (t0 * 1000.0).round() as i64;
    let end = (t1 * 1000.0).round() as i64;
    Ok((start..=end).step_by(period as usize).collect())
}

/// Stream labels feeding the per-frame seed derivation.
const STREAM_SPINNING: u64 = 1;
const STREAM_SOLID: u64 = 2;
const STREAM_IMU: u64 = 3;

fn splitmix64(mut v: u64) -> u64 {
    v = v.wrapping_add(0x9E3779B97F4A7C15);
    v = (v ^ (v >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    v = (v ^ (v >> 27)).wrapping_mul(0x94D049BB133111EB);
    v ^ (v >> 31)
}

/// Per-frame RNG seed from `(dataset seed, stream, frame index)`, so
/// frames are independent and any subset regenerates identically.
pub fn frame_seed(seed: u64, stream: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(stream ^ splitmix64(index)))
}

/// Simulates and writes a full dataset. Output bytes are a pure function
/// of `(scene, script, rig, seed)`.
pub fn export_dataset(
    scene: &Scene,
    script: &MotionScript,
    rig: &SensorRig,
    seed: u64,
    out_dir: impl AsRef<Path>,
) -> Result<DatasetManifest> {
    rig.validate()?;
    let paths = DatasetPaths::under(out_dir.as_ref());
    fs::create_dir_all(&paths.spinning_dir)?;
    fs::create_dir_all(&paths.solid_dir)?;

    // Spinning scans + exact truth at their stamps.
    let spin_stamps = frame_stamps_ms(script, rig.spinning.rate_hz, "spinning")?;
    let mut truth_poses: Vec<Pose<f64>> = Vec::with_capacity(spin_stamps.len());
    for (k, &ms) in spin_stamps.iter().enumerate() {
        let t = ms as f64 / 1000.0;
        let pose = script.pose_at(t);
        let cloud = simulate_spinning_scan(
            scene,
            &pose,
            &rig.spinning,
            frame_seed(seed, STREAM_SPINNING, k as u64),
        )?;
        write_pcd(
            &cloud,
            paths.spinning_dir.join(format!("{ms:09}.pcd")),
            PcdEncoding::Binary,
        )?;
        truth_poses.push(pose.with_stamp(t));
    }
    write_tum(&Trajectory::from_poses(truth_poses)?, &paths.truth_tum)?;

    // Solid-state scans, phase advanced by absolute frame time.
    let solid_stamps = frame_stamps_ms(script, rig.solid_state.rate_hz, "solid-state")?;
    for (k, &ms) in solid_stamps.iter().enumerate() {
        let t = ms as f64 / 1000.0;
        let pose = script.pose_at(t);
        let cloud = simulate_solid_state_scan(
            scene,
            &pose,
            &rig.solid_state,
            t,
            frame_seed(seed, STREAM_SOLID, k as u64),
        )?;
        write_pcd(
            &cloud,
            paths.solid_dir.join(format!("{ms:09}.pcd")),
            PcdEncoding::Binary,
        )?;
    }

    // IMU stream.
    let imu = synthesize_imu(
        script,
        rig.imu_rate_hz,
        rig.imu_noise_accel,
        rig.imu_noise_gyro,
        frame_seed(seed, STREAM_IMU, 0),
    )?;
    write_imu_csv(&imu, &paths.imu_csv)?;

    let (t_start, t_end) = script.time_span();
    let manifest = DatasetManifest {
        format: "gtforge-dataset".into(),
        version: 1,
        seed,
        scene: scene.name().to_string(),
        rig: rig.clone(),
        script: ScriptSummary {
            t_start,
            t_end,
            waypoint_count: script.waypoints().len(),
            stop_windows: script.stop_windows().to_vec(),
        },
        spinning_frames: spin_stamps.len(),
        solid_frames: solid_stamps.len(),
        imu_samples: imu.len(),
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&paths.manifest_json, json + "\n")?;
    Ok(manifest)
}
