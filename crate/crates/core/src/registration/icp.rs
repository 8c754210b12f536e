//! Point-to-point iterative closest point.

use crate::error::{Error, Result};
use crate::geom::{KdTree, PointCloud, Pose};
use crate::registration::{evaluate_alignment, find_correspondences, RegParams, RegResult};
use crate::scalar::Real;
use crate::traj::umeyama_alignment;

/// Classic ICP: alternate nearest-neighbor correspondence search with the
/// closed-form rigid solve over the matched pairs. Each accepted update is
/// the exact minimizer for its correspondence set, so the cost never
/// increases between iterations.
pub fn icp_align<T: Real>(
    source: &PointCloud<T>,
    target: &PointCloud<T>,
    init: &Pose<T>,
    params: &RegParams,
) -> Result<RegResult<T>> {
    params.validate()?;
    if source.is_empty() || target.is_empty() {
        return Err(Error::EmptyInput("icp source/target cloud".into()));
    }
    let tree = KdTree::build(&target.positions);
    let max_corr = T::from_f64_c(params.max_corr_dist);
    let trans_eps = T::from_f64_c(params.translation_eps);
    let rot_eps = T::from_f64_c(params.rotation_eps);

    let mut pose = *init;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < params.max_iterations {
        iterations += 1;
        let pairs = find_correspondences(&tree, &source.positions, &pose, max_corr);
        if pairs.is_empty() {
            return Err(Error::NoOverlap);
        }
        let moved: Vec<_> = pairs
            .iter()
            .map(|&(i, _)| pose.transform_point(&source.positions[i]))
            .collect();
        let matched: Vec<_> = pairs.iter().map(|&(_, j)| target.positions[j]).collect();
        let delta = umeyama_alignment(&moved, &matched)?;
        pose = delta.compose(&pose);
        if delta.translation.norm() < trans_eps && delta.rotation.angle() < rot_eps {
            converged = true;
            break;
        }
    }

    let (fitness, inlier_rmse) = evaluate_alignment(&tree, &source.positions, &pose, max_corr);
    Ok(RegResult {
        pose,
        fitness,
        inlier_rmse,
        iterations,
        converged,
    })
}
