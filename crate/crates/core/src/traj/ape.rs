//! Absolute position error statistics and reference-frame transfer.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Pose;
use crate::traj::{associate_timestamps, umeyama_alignment, Trajectory};

/// How the estimate is aligned to the reference before measuring errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlignMode {
    /// Compare in the frames as given.
    #[default]
    None,
    /// Closed-form rigid alignment of the paired positions first.
    Umeyama,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ApeOptions {
    pub align: AlignMode,
    /// Association tolerance, seconds.
    pub max_dt: f64,
}

impl Default for ApeOptions {
    fn default() -> Self {
        ApeOptions {
            align: AlignMode::None,
            max_dt: 0.02,
        }
    }
}

/// Translational error statistics over associated pose pairs.
/// `std` is the population standard deviation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ApeStats {
    pub mean: f64,
    pub std: f64,
    pub rmse: f64,
    pub median: f64,
    pub max: f64,
    pub pair_count: usize,
    /// `(estimate stamp, error in meters)` per associated pair.
    pub per_pose_errors: Vec<(f64, f64)>,
}

/// Absolute position error of `est` against `reference`.
pub fn compute_ape(est: &Trajectory, reference: &Trajectory, opts: &ApeOptions) -> Result<ApeStats> {
    let pairs = associate_timestamps(est, reference, opts.max_dt)?;

    let alignment = match opts.align {
        AlignMode::None => Pose::identity(),
        AlignMode::Umeyama => {
            let src: Vec<Vector3<f64>> = pairs
                .iter()
                .map(|&(i, _)| est.poses()[i].translation)
                .collect();
            let dst: Vec<Vector3<f64>> = pairs
                .iter()
                .map(|&(_, j)| reference.poses()[j].translation)
                .collect();
            umeyama_alignment(&src, &dst)?
        }
    };

    let per_pose_errors: Vec<(f64, f64)> = pairs
        .iter()
        .map(|&(i, j)| {
            let e = &est.poses()[i];
            let r = &reference.poses()[j];
            let err = (r.translation - alignment.transform_point(&e.translation)).norm();
            (e.stamp, err)
        })
        .collect();

    Ok(stats_from_errors(per_pose_errors))
}

fn stats_from_errors(per_pose_errors: Vec<(f64, f64)>) -> ApeStats {
    let n = per_pose_errors.len();
    let count = n as f64;
    let sum: f64 = per_pose_errors.iter().map(|&(_, e)| e).sum();
    let mean = sum / count;
    let var: f64 = per_pose_errors
        .iter()
        .map(|&(_, e)| (e - mean) * (e - mean))
        .sum::<f64>()
        / count;
    let rmse = (per_pose_errors.iter().map(|&(_, e)| e * e).sum::<f64>() / count).sqrt();
    let max = per_pose_errors.iter().map(|&(_, e)| e).fold(0.0, f64::max);

    let mut sorted: Vec<f64> = per_pose_errors.iter().map(|&(_, e)| e).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };

    ApeStats {
        mean,
        std: var.sqrt(),
        rmse,
        median,
        max,
        pair_count: n,
        per_pose_errors,
    }
}

/// Conjugates every pose into another body frame: with `extrinsic` the
/// transform from the current body frame to the reference sensor frame,
/// each pose `P` becomes `X · P · X⁻¹`. Stamps are preserved.
pub fn apply_reference_transform(traj: &Trajectory, extrinsic: &Pose<f64>) -> Trajectory {
    let inv = extrinsic.inverse();
    let poses = traj
        .poses()
        .iter()
        .map(|p| {
            let stamp = p.stamp;
            extrinsic.compose(p).compose(&inv).with_stamp(stamp)
        })
        .collect();
    Trajectory::from_poses(poses).expect("conjugation preserves stamps")
}

/// Per-axis population standard deviation of the translations inside the
/// time window, plus the overall combined value `√(σx²+σy²+σz²)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StationaryDeviation {
    pub per_axis: [f64; 3],
    pub overall: f64,
}

pub fn stationary_deviation(
    gt: &Trajectory,
    window: (f64, f64),
) -> Result<StationaryDeviation> {
    let poses = gt.slice_by_time(window.0, window.1);
    if poses.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "stationary deviation needs >= 2 poses in the window, found {}",
            poses.len()
        )));
    }
    let count = poses.len() as f64;
    let mean = poses
        .iter()
        .fold(Vector3::zeros(), |a: Vector3<f64>, p| a + p.translation)
        / count;
    let var = poses.iter().fold(Vector3::zeros(), |a: Vector3<f64>, p| {
        let d = p.translation - mean;
        a + d.component_mul(&d)
    }) / count;
    let per_axis = [var.x.sqrt(), var.y.sqrt(), var.z.sqrt()];
    Ok(StationaryDeviation {
        per_axis,
        overall: (var.x + var.y + var.z).sqrt(),
    })
}
