//! Newton alignment of scans against an NDT grid, and sequence tracking.

use nalgebra::Matrix6;

use crate::error::{Error, Result};
use crate::geom::{voxel_downsample, PointCloud, Pose};
use crate::ndt::{score_pose, NdtGrid, NdtParams};
use crate::registration::RegResult;
use crate::scalar::Real;
use crate::traj::Trajectory;

const MAX_STEP_HALVINGS: usize = 8;

/// Aligns a scan to the grid by Newton iterations on the negative score.
/// The Hessian is pushed to positive-definite by adding `lambda * I` as
/// needed. Scans are voxel-downsampled to a quarter of the cell size
/// before alignment.
///
/// In the returned [`RegResult`], `fitness` is the fraction of scan
/// points that landed in occupied cells at the final pose and
/// `inlier_rmse` the RMS distance from those points to their cell means.
pub fn align<T: Real>(
    grid: &NdtGrid<T>,
    scan: &PointCloud<T>,
    init: &Pose<T>,
    params: &NdtParams,
) -> Result<RegResult<T>> {
    params.validate()?;
    if grid.is_empty() || scan.is_empty() {
        return Err(Error::EmptyInput("ndt grid/scan".into()));
    }
    let leaf = grid.cell_size() / T::from_f64_c(4.0);
    let ds = voxel_downsample(scan, leaf)?;
    let trans_eps = T::from_f64_c(params.translation_eps);
    let rot_eps = T::from_f64_c(params.rotation_eps);

    let mut pose = *init;
    let mut eval = score_pose(grid, &ds, &pose);
    if eval.matched_points == 0 {
        return Err(Error::NoOverlap);
    }

    let mut converged = false;
    let mut iterations = 0;
    while iterations < params.max_iterations {
        iterations += 1;

        // Ascend the score: the Newton step solves (-H) d = g.
        let neg_hessian = -eval.hessian;
        let delta = solve_regularized(&neg_hessian, eval.gradient)?;
        let rho = delta.fixed_rows::<3>(0).into_owned();
        let omega = delta.fixed_rows::<3>(3).into_owned();
        if rho.norm() < trans_eps && omega.norm() < rot_eps {
            converged = true;
            break;
        }

        let mut alpha = T::one();
        let mut accepted = None;
        for _ in 0..=MAX_STEP_HALVINGS {
            let candidate = pose.left_increment(&(rho * alpha), &(omega * alpha));
            let cand_eval = score_pose(grid, &ds, &candidate);
            if cand_eval.score >= eval.score && cand_eval.matched_points > 0 {
                accepted = Some((candidate, cand_eval));
                break;
            }
            alpha *= T::from_f64_c(0.5);
        }
        match accepted {
            Some((candidate, cand_eval)) => {
                pose = candidate;
                eval = cand_eval;
            }
            None => {
                // No improving step. If even the smallest probe was below
                // the convergence thresholds, this is a local optimum at
                // finer resolution than the stopping criterion asks for.
                let alpha_min = T::from_f64_c(0.5f64.powi(MAX_STEP_HALVINGS as i32));
                converged = (rho * alpha_min).norm() < trans_eps
                    && (omega * alpha_min).norm() < rot_eps;
                break;
            }
        }
    }

    // Diagnostics at the final pose.
    let final_eval = score_pose(grid, &ds, &pose);
    let mut sq_sum = T::zero();
    let mut matched = 0usize;
    for raw in &ds.positions {
        let p = pose.transform_point(raw);
        if let Some(cell) = grid.cell_at(&p) {
            sq_sum += (p - cell.mean).norm_squared();
            matched += 1;
        }
    }
    let inlier_rmse = if matched > 0 {
        (sq_sum / T::from_f64_c(matched as f64)).sqrt().to_f64_c()
    } else {
        0.0
    };
    let _ = final_eval;
    Ok(RegResult {
        pose,
        fitness: matched as f64 / ds.len() as f64,
        inlier_rmse,
        iterations,
        converged,
    })
}

/// Solves `(m + lambda I) x = rhs`, raising `lambda` until the matrix
/// factors. Rank deficiency that survives heavy regularization is an
/// error.
fn solve_regularized<T: Real>(
    m: &Matrix6<T>,
    rhs: nalgebra::Vector6<T>,
) -> Result<nalgebra::Vector6<T>> {
    if let Some(chol) = m.cholesky() {
        return Ok(chol.solve(&rhs));
    }
    let scale = m.diagonal().amax().max(T::from_f64_c(1e-12));
    let mut lambda = scale * T::from_f64_c(1e-9);
    for _ in 0..24 {
        let damped = m + Matrix6::identity() * lambda;
        if let Some(chol) = damped.cholesky() {
            return Ok(chol.solve(&rhs));
        }
        lambda *= T::from_f64_c(10.0);
    }
    Err(Error::SingularSystem)
}

/// Per-scan tracking against a fixed grid.
#[derive(Debug, Clone)]
pub struct TrackResult {
    pub trajectory: Trajectory,
    /// Scans whose alignment failed or did not converge; those poses are
    /// the motion-model extrapolation or the non-converged estimate.
    pub degraded: Vec<bool>,
}

/// Aligns each scan in turn, seeding every alignment with the
/// constant-velocity extrapolation of the previous two poses. A failure
/// on the first scan aborts; later failures fall back to the motion
/// model and are flagged.
pub fn track_sequence(
    grid: &NdtGrid<f64>,
    scans: &[PointCloud<f64>],
    init: &Pose<f64>,
    params: &NdtParams,
) -> Result<TrackResult> {
    params.validate()?;
    if scans.is_empty() {
        return Err(Error::EmptyInput("ndt tracking needs scans".into()));
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
    for (k, scan) in scans.iter().enumerate() {
        let guess = match k {
            0 => *init,
            1 => poses[0],
            _ => {
                let step = poses[k - 2].inverse().compose(&poses[k - 1]);
                poses[k - 1].compose(&step)
            }
        }
        .with_stamp(scan.stamp);

        match align(grid, scan, &guess, params) {
            Ok(res) => {
                if !res.converged {
                    degraded[k] = true;
                }
                poses.push(res.pose.with_stamp(scan.stamp));
            }
            Err(e) if k == 0 => {
                return Err(Error::LocalizationLost(format!(
                    "first scan failed to align: {e}"
                )));
            }
            Err(e) => {
                log::warn!("ndt tracking scan {k}: {e}; falling back to motion model");
                degraded[k] = true;
                poses.push(guess);
            }
        }
    }

    Ok(TrackResult {
        trajectory: Trajectory::from_poses(poses)?,
        degraded,
    })
}
