//! Point-cloud registration: point-to-point ICP, generalized ICP, and a
//! scan-to-map incremental odometry.

mod covariance;
mod gicp;
mod icp;
mod odometry;

pub use covariance::{estimate_covariances, knn_covariances, regularize_plane_disk};
pub use gicp::{gicp_align, gicp_align_with_covariances};
pub use icp::icp_align;
pub use odometry::{incremental_odometry, OdometryParams, OdometryResult};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{KdTree, Pose};
use crate::scalar::Real;

/// Parameters shared by the iterative aligners.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RegParams {
    /// Correspondences farther than this are rejected, meters.
    pub max_corr_dist: f64,
    pub max_iterations: usize,
    /// Converged once the translation update falls below this, meters.
    pub translation_eps: f64,
    /// ... and the rotation update below this, radians.
    pub rotation_eps: f64,
    /// Neighborhood size for covariance estimation.
    pub k_neighbors: usize,
    /// Smallest regularized covariance eigenvalue (plane thickness).
    pub cov_epsilon: f64,
}

impl Default for RegParams {
    fn default() -> Self {
        RegParams {
            max_corr_dist: 1.0,
            max_iterations: 50,
            translation_eps: 1e-4,
            rotation_eps: 1e-4,
            k_neighbors: 20,
            cov_epsilon: 1e-3,
        }
    }
}

impl RegParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_corr_dist > 0.0
            && self.max_iterations >= 1
            && self.translation_eps > 0.0
            && self.rotation_eps > 0.0
            && self.k_neighbors >= 1
            && self.cov_epsilon > 0.0
        {
            Ok(())
        } else {
            Err(Error::InvalidArgument(
                "registration parameters must be positive and max_iterations >= 1".into(),
            ))
        }
    }
}

/// Outcome of an alignment. `pose` maps source coordinates into the
/// target frame (target-from-source).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegResult<T: Real> {
    pub pose: Pose<T>,
    /// Fraction of source points with a target neighbor within
    /// `max_corr_dist` at the final pose, in `[0, 1]`.
    pub fitness: f64,
    /// RMS distance over those inlier correspondences, meters.
    pub inlier_rmse: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Fitness and inlier RMSE of `source` against the target index at a
/// given pose. This is the definition `RegResult` reports, kept as a
/// free function so tests can recompute it independently of the solvers.
pub fn evaluate_alignment<T: Real>(
    target: &KdTree<T>,
    source: &[Vector3<T>],
    pose: &Pose<T>,
    max_corr_dist: T,
) -> (f64, f64) {
    let mut inliers = 0usize;
    let mut sq_sum = T::zero();
    for p in source {
        let world = pose.transform_point(p);
        if let Some(nb) = target.nearest(&world) {
            if nb.distance <= max_corr_dist {
                inliers += 1;
                sq_sum += nb.distance * nb.distance;
            }
        }
    }
    if source.is_empty() || inliers == 0 {
        return (0.0, 0.0);
    }
    let rmse = (sq_sum / T::from_f64_c(inliers as f64)).sqrt().to_f64_c();
    (inliers as f64 / source.len() as f64, rmse)
}

/// Index pairs `(source, target)` within `max_corr_dist` at `pose`,
/// in source index order.
pub(crate) fn find_correspondences<T: Real>(
    target: &KdTree<T>,
    source: &[Vector3<T>],
    pose: &Pose<T>,
    max_corr_dist: T,
) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(source.len());
    for (i, p) in source.iter().enumerate() {
        let world = pose.transform_point(p);
        if let Some(nb) = target.nearest(&world) {
            if nb.distance <= max_corr_dist {
                pairs.push((i, nb.index));
            }
        }
    }
    pairs
}
