//! Generalized ICP: plane-to-plane registration.
//!
//! Each correspondence contributes `dᵀ (C_target + R C_source Rᵀ)⁻¹ d`,
//! with per-point covariances regularized to the plane-disk model.
//! Minimization is Gauss-Newton on SE(3) with step halving against the
//! frozen-correspondence cost, so accepted steps never increase it.

use nalgebra::{Matrix3, Matrix3x6, Matrix6, Vector3, Vector6};

use crate::error::{Error, Result};
use crate::geom::{KdTree, PointCloud, Pose};
use crate::registration::{
    estimate_covariances, evaluate_alignment, find_correspondences, RegParams, RegResult,
};
use crate::scalar::Real;

const MAX_STEP_HALVINGS: usize = 8;

/// Aligns `source` onto `target`, estimating covariances from scratch.
pub fn gicp_align<T: Real>(
    source: &PointCloud<T>,
    target: &PointCloud<T>,
    init: &Pose<T>,
    params: &RegParams,
) -> Result<RegResult<T>> {
    params.validate()?;
    if source.is_empty() || target.is_empty() {
        return Err(Error::EmptyInput("gicp source/target cloud".into()));
    }
    let eps = T::from_f64_c(params.cov_epsilon);
    let source_covs = estimate_covariances(source, params.k_neighbors, eps)?;
    let target_covs = estimate_covariances(target, params.k_neighbors, eps)?;
    let tree = KdTree::build(&target.positions);
    gicp_align_with_covariances(
        &source.positions,
        &source_covs,
        &target.positions,
        &target_covs,
        &tree,
        init,
        params,
    )
}

/// Same solver with caller-provided covariances and target index; the
/// odometry front-end uses this to reuse per-scan preprocessing.
pub fn gicp_align_with_covariances<T: Real>(
    source: &[Vector3<T>],
    source_covs: &[Matrix3<T>],
    target: &[Vector3<T>],
    target_covs: &[Matrix3<T>],
    tree: &KdTree<T>,
    init: &Pose<T>,
    params: &RegParams,
) -> Result<RegResult<T>> {
    run(
        source,
        source_covs,
        target,
        target_covs,
        tree,
        init,
        params,
        None,
    )
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn run<T: Real>(
    source: &[Vector3<T>],
    source_covs: &[Matrix3<T>],
    target: &[Vector3<T>],
    target_covs: &[Matrix3<T>],
    tree: &KdTree<T>,
    init: &Pose<T>,
    params: &RegParams,
    mut step_costs: Option<&mut Vec<(f64, f64)>>,
) -> Result<RegResult<T>> {
    params.validate()?;
    if source.is_empty() || target.is_empty() {
        return Err(Error::EmptyInput("gicp source/target cloud".into()));
    }
    debug_assert_eq!(source.len(), source_covs.len());
    debug_assert_eq!(target.len(), target_covs.len());

    let max_corr = T::from_f64_c(params.max_corr_dist);
    let trans_eps = T::from_f64_c(params.translation_eps);
    let rot_eps = T::from_f64_c(params.rotation_eps);
    let half = T::from_f64_c(0.5);

    let mut pose = *init;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < params.max_iterations {
        iterations += 1;
        let pairs = find_correspondences(tree, source, &pose, max_corr);
        if pairs.is_empty() {
            return Err(Error::NoOverlap);
        }

        let rot = pose.rotation_matrix();
        let mut weights = Vec::with_capacity(pairs.len());
        let mut h = Matrix6::<T>::zeros();
        let mut g = Vector6::<T>::zeros();
        let mut cost0 = T::zero();
        for &(i, j) in &pairs {
            let p = pose.transform_point(&source[i]);
            let combined = target_covs[j] + rot * source_covs[i] * rot.transpose();
            let w = combined
                .try_inverse()
                .expect("regularized covariances are positive-definite");
            let r = target[j] - p;

            let mut jac = Matrix3x6::<T>::zeros();
            jac.fixed_view_mut::<3, 3>(0, 0)
                .copy_from(&(-Matrix3::identity()));
            jac.fixed_view_mut::<3, 3>(0, 3).copy_from(&p.cross_matrix());

            let wj = w * jac;
            h += jac.transpose() * wj;
            g += wj.transpose() * r;
            cost0 += (r.transpose() * w * r)[(0, 0)];
            weights.push(w);
        }

        if normal_matrix_is_degenerate(&h, params.cov_epsilon) {
            return Err(Error::SingularSystem);
        }
        let chol = h.cholesky().ok_or(Error::SingularSystem)?;
        let delta = chol.solve(&(-g));
        let rho = delta.fixed_rows::<3>(0).into_owned();
        let omega = delta.fixed_rows::<3>(3).into_owned();
        if rho.norm() < trans_eps && omega.norm() < rot_eps {
            converged = true;
            break;
        }

        // Step halving against the frozen correspondence set and weights.
        let frozen_cost = |candidate: &Pose<T>| -> T {
            let mut c = T::zero();
            for (idx, &(i, j)) in pairs.iter().enumerate() {
                let r = target[j] - candidate.transform_point(&source[i]);
                c += (r.transpose() * weights[idx] * r)[(0, 0)];
            }
            c
        };
        let mut alpha = T::one();
        let mut accepted = false;
        for _ in 0..=MAX_STEP_HALVINGS {
            let candidate = pose.left_increment(&(rho * alpha), &(omega * alpha));
            let cost = frozen_cost(&candidate);
            if cost <= cost0 {
                if let Some(trace) = step_costs.as_deref_mut() {
                    trace.push((cost0.to_f64_c(), cost.to_f64_c()));
                }
                pose = candidate;
                accepted = true;
                break;
            }
            alpha *= half;
        }
        if !accepted {
            break;
        }
    }

    let (fitness, inlier_rmse) = evaluate_alignment(tree, source, &pose, max_corr);
    Ok(RegResult {
        pose,
        fitness,
        inlier_rmse,
        iterations,
        converged,
    })
}

/// Geometry that leaves a degree of freedom unconstrained (a single
/// plane, a featureless corridor axis) shows up as a translation or
/// rotation block of the normal matrix whose smallest eigenvalue sits at
/// the covariance floor: the in-plane/normal weight ratio of the
/// plane-disk model is exactly `cov_epsilon`, so a block ratio at that
/// floor means the direction carries no information beyond the
/// regularization. Blocks are tested separately so the check stays
/// independent of scene scale.
fn normal_matrix_is_degenerate<T: Real>(h: &Matrix6<T>, cov_epsilon: f64) -> bool {
    let threshold = T::from_f64_c(1.5 * cov_epsilon);
    let blocks = [
        h.fixed_view::<3, 3>(0, 0).into_owned(),
        h.fixed_view::<3, 3>(3, 3).into_owned(),
    ];
    blocks.iter().any(|block| {
        let ev = block.symmetric_eigen().eigenvalues;
        let max = ev.max();
        max <= T::zero() || ev.min() <= max * threshold
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::transform_cloud;
    use nalgebra::UnitQuaternion;
    use rand::{Rng, SeedableRng};

    fn room_walls(n: usize, noise: f64, seed: u64) -> PointCloud<f64> {
        // Samples on the interior surfaces of a 6 x 5 x 3 room.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut pts = Vec::with_capacity(n);
        let (lx, ly, lz) = (6.0, 5.0, 3.0f64);
        for _ in 0..n {
            let face = rng.random_range(0..6);
            let (u, v) = (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0f64));
            let p = match face {
                0 => Vector3::new(0.0, u * ly, v * lz),
                1 => Vector3::new(lx, u * ly, v * lz),
                2 => Vector3::new(u * lx, 0.0, v * lz),
                3 => Vector3::new(u * lx, ly, v * lz),
                4 => Vector3::new(u * lx, v * ly, 0.0),
                _ => Vector3::new(u * lx, v * ly, lz),
            };
            let jitter = Vector3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            ) * noise;
            pts.push(p + jitter);
        }
        PointCloud::from_positions(pts)
    }

    #[test]
    fn self_alignment_is_a_fixed_point() {
        let cloud = room_walls(800, 0.0, 1);
        let res = gicp_align(&cloud, &cloud, &Pose::identity(), &RegParams::default()).unwrap();
        assert!(res.converged);
        assert!(res.pose.translation.norm() < 1e-6);
        assert!(res.pose.rotation.angle() < 1e-6);
    }

    #[test]
    fn recovers_pose_between_two_noisy_room_scans() {
        // Two independently noisy (2 cm) samplings of the same room,
        // offset by 0.3 m and 5 degrees.
        let truth = Pose::from_parts(
            UnitQuaternion::from_axis_angle(&Vector3::z_axis(), 5.0_f64.to_radians()),
            Vector3::new(0.3, 0.0, 0.0),
        );
        let base = room_walls(2500, 0.02, 2);
        let observed = room_walls(2500, 0.02, 3);
        // target sees the room moved by `truth`.
        let target = transform_cloud(&observed, &truth);
        let res = gicp_align(&base, &target, &Pose::identity(), &RegParams::default()).unwrap();
        assert!(res.converged);
        assert!(
            res.pose.translation_distance_to(&truth) < 0.02,
            "translation error {}",
            res.pose.translation_distance_to(&truth)
        );
        assert!(res.pose.rotation_angle_to(&truth) < 0.5_f64.to_radians());
    }

    #[test]
    fn single_plane_does_not_constrain_in_plane_motion() {
        // Two independent samplings of the same infinite-plane patch:
        // in-plane translation is unobservable, so the solver must either
        // fail to converge or report a singular system.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let mut sample_plane = |seed_shift: f64| {
            PointCloud::from_positions(
                (0..400)
                    .map(|_| {
                        Vector3::new(
                            rng.random_range(-5.0..5.0) + seed_shift,
                            rng.random_range(-5.0..5.0),
                            0.0,
                        )
                    })
                    .collect(),
            )
        };
        let source = sample_plane(0.0);
        let target = sample_plane(0.1);
        match gicp_align(&source, &target, &Pose::identity(), &RegParams::default()) {
            Err(Error::SingularSystem) => {}
            Ok(res) => assert!(!res.converged, "degenerate geometry must not converge"),
            Err(other) => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn accepted_steps_never_increase_the_frozen_cost() {
        let truth = Pose::from_parts(
            UnitQuaternion::from_scaled_axis(Vector3::new(0.03, 0.05, -0.04)),
            Vector3::new(0.2, -0.1, 0.15),
        );
        let source = room_walls(1500, 0.02, 5);
        let target = transform_cloud(&room_walls(1500, 0.02, 6), &truth);
        let params = RegParams::default();
        let eps = params.cov_epsilon;
        let source_covs = estimate_covariances(&source, params.k_neighbors, eps).unwrap();
        let target_covs = estimate_covariances(&target, params.k_neighbors, eps).unwrap();
        let tree = KdTree::build(&target.positions);
        let mut trace = Vec::new();
        let res = run(
            &source.positions,
            &source_covs,
            &target.positions,
            &target_covs,
            &tree,
            &Pose::identity(),
            &params,
            Some(&mut trace),
        )
        .unwrap();
        assert!(res.converged);
        assert!(!trace.is_empty());
        for (before, after) in trace {
            assert!(after <= before + 1e-9, "step increased cost: {before} -> {after}");
        }
    }

    #[test]
    fn reported_rmse_matches_independent_recomputation() {
        let source = room_walls(900, 0.01, 7);
        let target = room_walls(900, 0.01, 8);
        let params = RegParams::default();
        let res = gicp_align(&source, &target, &Pose::identity(), &params).unwrap();
        let tree = KdTree::build(&target.positions);
        let (fitness, rmse) =
            evaluate_alignment(&tree, &source.positions, &res.pose, params.max_corr_dist);
        assert!((res.fitness - fitness).abs() < 1e-12);
        assert!((res.inlier_rmse - rmse).abs() < 1e-9);
    }

    #[test]
    fn left_invariant_under_a_common_rigid_move() {
        let truth = Pose::from_parts(
            UnitQuaternion::from_scaled_axis(Vector3::new(0.01, -0.02, 0.03)),
            Vector3::new(0.1, 0.05, -0.08),
        );
        let source = room_walls(1200, 0.0, 9);
        let target = transform_cloud(&source, &truth);

        let mut tight = RegParams::default();
        tight.translation_eps = 1e-10;
        tight.rotation_eps = 1e-10;
        tight.max_iterations = 100;

        let base = gicp_align(&source, &target, &Pose::identity(), &tight).unwrap();
        let base_err = base.pose.translation_distance_to(&truth);

        let g = Pose::from_parts(
            UnitQuaternion::from_scaled_axis(Vector3::new(-0.3, 0.7, 0.2)),
            Vector3::new(2.0, -3.0, 1.0),
        );
        let conjugate_truth = g.compose(&truth).compose(&g.inverse());
        let moved = gicp_align(
            &transform_cloud(&source, &g),
            &transform_cloud(&target, &g),
            &Pose::identity(),
            &tight,
        )
        .unwrap();
        let moved_err = moved.pose.translation_distance_to(&conjugate_truth);
        assert!(
            (moved_err - base_err).abs() < 1e-6,
            "errors differ: {base_err} vs {moved_err}"
        );
    }
}
