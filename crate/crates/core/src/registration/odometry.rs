//! Scan-to-map incremental odometry.
//!
//! Stands in for a full SLAM stack at desk scale: each scan is registered
//! with GICP against a rolling window of recent scans, seeded by a
//! constant-velocity motion model. No loop closure, no feature extraction.

use std::collections::VecDeque;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{voxel_downsample, KdTree, PointCloud, Pose};
use crate::registration::{estimate_covariances, gicp, RegParams};
use crate::traj::Trajectory;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OdometryParams {
    pub reg: RegParams,
    /// Voxel leaf applied to each incoming scan before registration, meters.
    pub scan_leaf: f64,
    /// Number of recent scans kept in the rolling local map.
    pub window: usize,
}

impl Default for OdometryParams {
    fn default() -> Self {
        OdometryParams {
            reg: RegParams {
                max_iterations: 30,
                ..RegParams::default()
            },
            scan_leaf: 0.15,
            window: 15,
        }
    }
}

impl OdometryParams {
    pub fn validate(&self) -> Result<()> {
        self.reg.validate()?;
        if self.scan_leaf <= 0.0 || self.window == 0 {
            return Err(Error::InvalidArgument(
                "odometry scan_leaf must be positive and window >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Per-scan poses plus a parallel flag marking scans whose registration
/// failed or did not converge (those fall back to the motion model).
#[derive(Debug, Clone)]
pub struct OdometryResult {
    pub trajectory: Trajectory,
    pub degraded: Vec<bool>,
}

struct MapScan {
    /// Downsampled points in the scan's own frame.
    positions: Vec<Vector3<f64>>,
    /// Regularized covariances in the scan's own frame.
    covariances: Vec<Matrix3<f64>>,
    pose: Pose<f64>,
}

/// Runs the odometry over time-ordered scans. The first pose is the
/// identity; every subsequent scan is aligned to the rolling local map
/// with the constant-velocity extrapolation as the initial guess.
pub fn incremental_odometry(
    scans: &[PointCloud<f64>],
    params: &OdometryParams,
) -> Result<OdometryResult> {
    params.validate()?;
    if scans.is_empty() {
        return Err(Error::EmptyInput("odometry needs at least one scan".into()));
    }
    for w in scans.windows(2) {
        if w[1].stamp <= w[0].stamp {
            return Err(Error::UnorderedTimestamps(format!(
                "scan stamps {} followed by {}",
                w[0].stamp, w[1].stamp
            )));
        }
    }

    let mut poses: Vec<Pose<f64>> = Vec::with_capacity(scans.len());
    let mut degraded = vec![false; scans.len()];
    let mut window: VecDeque<MapScan> = VecDeque::with_capacity(params.window);

    for (k, scan) in scans.iter().enumerate() {
        let ds = voxel_downsample(scan, params.scan_leaf)?;
        let preprocessed = estimate_covariances(&ds, params.reg.k_neighbors, params.reg.cov_epsilon)
            .ok()
            .map(|covs| (ds.positions.clone(), covs));

        let pose = if k == 0 {
            Pose::identity().with_stamp(scan.stamp)
        } else {
            let init = motion_model(&poses, k).with_stamp(scan.stamp);
            match preprocessed.as_ref() {
                Some((src_pts, src_covs)) if !window.is_empty() => {
                    let (tgt_pts, tgt_covs) = assemble_local_map(&window);
                    let tree = KdTree::build(&tgt_pts);
                    match gicp::gicp_align_with_covariances(
                        src_pts, src_covs, &tgt_pts, &tgt_covs, &tree, &init, &params.reg,
                    ) {
                        // A refinement that ran out of iterations is still
                        // a better pose than the motion model; only a hard
                        // failure falls back and flags the pose.
                        Ok(res) => res.pose.with_stamp(scan.stamp),
                        Err(e) => {
                            log::warn!("odometry scan {k}: registration failed ({e}); using motion model");
                            degraded[k] = true;
                            init
                        }
                    }
                }
                _ => {
                    // Scan too sparse to register (or empty window).
                    degraded[k] = true;
                    init
                }
            }
        };

        if let Some((positions, covariances)) = preprocessed {
            if window.len() == params.window {
                window.pop_front();
            }
            window.push_back(MapScan {
                positions,
                covariances,
                pose,
            });
        }
        poses.push(pose);
    }

    Ok(OdometryResult {
        trajectory: Trajectory::from_poses(poses)?,
        degraded,
    })
}

/// Constant-velocity extrapolation: re-applies the last relative motion.
fn motion_model(poses: &[Pose<f64>], k: usize) -> Pose<f64> {
    if k >= 2 {
        let step = poses[k - 2].inverse().compose(&poses[k - 1]);
        poses[k - 1].compose(&step)
    } else {
        poses[k - 1]
    }
}

/// Concatenates the window scans in the odometry frame, rotating each
/// scan's covariances along with its pose.
fn assemble_local_map(window: &VecDeque<MapScan>) -> (Vec<Vector3<f64>>, Vec<Matrix3<f64>>) {
    let total: usize = window.iter().map(|s| s.positions.len()).sum();
    let mut pts = Vec::with_capacity(total);
    let mut covs = Vec::with_capacity(total);
    for scan in window {
        let rot = scan.pose.rotation_matrix();
        for (p, c) in scan.positions.iter().zip(&scan.covariances) {
            pts.push(scan.pose.transform_point(p));
            covs.push(rot * c * rot.transpose());
        }
    }
    (pts, covs)
}
