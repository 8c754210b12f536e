//! NDT mixture score and its analytic derivatives on SE(3).

use nalgebra::{Matrix3, Matrix3x6, Matrix6, Vector6};

use crate::geom::{PointCloud, Pose};
use crate::ndt::NdtGrid;
use crate::scalar::Real;

/// Score of a scan at a pose, with derivatives taken with respect to the
/// left-multiplicative increment `(rho, omega)` at that pose (the same
/// chart [`Pose::left_increment`] applies).
#[derive(Debug, Clone)]
pub struct ScoreEval<T: Real> {
    /// Sum of per-point mixture terms; zero for points in empty cells.
    pub score: T,
    pub gradient: Vector6<T>,
    pub hessian: Matrix6<T>,
    /// Points that fell into an occupied cell.
    pub matched_points: usize,
}

/// Evaluates the mixture score `sum_i a1 * exp(-a2/2 * q_i' B q_i)` over
/// scan points, each scored only against its containing cell, plus the
/// analytic gradient and Hessian.
pub fn score_pose<T: Real>(grid: &NdtGrid<T>, scan: &PointCloud<T>, pose: &Pose<T>) -> ScoreEval<T> {
    let constants = grid.constants();
    let a1 = constants.amplitude;
    let a2 = constants.shape;
    let half = T::from_f64_c(0.5);

    let mut score = T::zero();
    let mut gradient = Vector6::zeros();
    let mut hessian = Matrix6::zeros();
    let mut matched_points = 0usize;

    for raw in &scan.positions {
        let p = pose.transform_point(raw);
        let Some(cell) = grid.cell_at(&p) else {
            continue;
        };
        matched_points += 1;

        let b = &cell.inv_covariance;
        let q = p - cell.mean;
        let bq = b * q;
        let e = q.dot(&bq);
        let gauss = (-a2 * half * e).exp();
        score += a1 * gauss;

        // d q / d(rho, omega) at the identity increment.
        let mut jac = Matrix3x6::<T>::zeros();
        jac.fixed_view_mut::<3, 3>(0, 0).copy_from(&Matrix3::identity());
        jac.fixed_view_mut::<3, 3>(0, 3).copy_from(&(-p.cross_matrix()));

        // v_k = q' B dq/dx_k
        let v = jac.transpose() * bq;
        let factor = a1 * a2 * gauss;
        gradient += v * (-factor);

        // Second-derivative of the rotated point: only the omega-omega
        // block of q is curved; see the closed form below.
        let jbj = jac.transpose() * b * jac;
        let bq_dot_p = bq.dot(&p);
        for i in 0..6 {
            for j in 0..6 {
                let mut term = jbj[(i, j)] - a2 * v[i] * v[j];
                if i >= 3 && j >= 3 {
                    let (a, bb) = (i - 3, j - 3);
                    // (Bq) . d²(R p)/dw_a dw_b, with
                    // d²(Rp)/dw_a dw_b = (e_b p_a + e_a p_b)/2 - p δ_ab.
                    let mut curve = half * (bq[bb] * p[a] + bq[a] * p[bb]);
                    if a == bb {
                        curve -= bq_dot_p;
                    }
                    term += curve;
                }
                hessian[(i, j)] -= factor * term;
            }
        }
    }

    ScoreEval {
        score,
        gradient,
        hessian,
        matched_points,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ndt::{build_grid, NdtParams};
    use rand::{Rng, SeedableRng};

    fn dense_random_cloud(n: usize, seed: u64, extent: f64) -> PointCloud<f64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        PointCloud::from_positions(
            (0..n)
                .map(|_| {
                    Vector3::new(
                        rng.random_range(-extent..extent),
                        rng.random_range(-extent..extent),
                        rng.random_range(-extent..extent),
                    )
                })
                .collect(),
        )
    }

    fn analytic_max(params: &NdtParams) -> f64 {
        // The positive-form amplitude, recomputed independently.
        let c1 = 10.0 * (1.0 - params.outlier_ratio);
        let c2 = params.outlier_ratio / params.cell_size.powi(3);
        let d3 = -(c2.ln());
        (c1 + c2).ln() + d3
    }

    #[test]
    fn point_at_cell_mean_scores_the_mixture_maximum() {
        let params = NdtParams::default();
        let map = dense_random_cloud(4000, 21, 3.0);
        let grid = build_grid(&map, &params).unwrap();
        let (&key, cell) = grid.iter_cells().next().unwrap();
        let _ = key;
        let scan = PointCloud::from_positions(vec![cell.mean]);
        let eval = score_pose(&grid, &scan, &Pose::identity());
        assert_eq!(eval.matched_points, 1);
        assert!((eval.score - analytic_max(&params)).abs() < 1e-12);
        assert!((eval.score - grid.constants().amplitude).abs() < 1e-12);
    }

    #[test]
    fn point_outside_all_cells_scores_zero() {
        let map = dense_random_cloud(4000, 22, 3.0);
        let grid = build_grid(&map, &NdtParams::default()).unwrap();
        let scan = PointCloud::from_positions(vec![Vector3::new(500.0, 500.0, 500.0)]);
        let eval = score_pose(&grid, &scan, &Pose::identity());
        assert_eq!(eval.matched_points, 0);
        assert_eq!(eval.score, 0.0);
        assert_eq!(eval.gradient.norm(), 0.0);
    }

    #[test]
    fn gradient_and_hessian_match_finite_differences() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let mut checked = 0;
        for trial in 0..20 {
            let map = dense_random_cloud(6000, 100 + trial, 4.0);
            let grid = build_grid(&map, &NdtParams::default()).unwrap();
            let raw_scan = dense_random_cloud(120, 200 + trial, 3.0);
            let pose = Pose::from_parts(
                nalgebra::UnitQuaternion::from_scaled_axis(Vector3::new(
                    rng.random_range(-0.1..0.1),
                    rng.random_range(-0.1..0.1),
                    rng.random_range(-0.1..0.1),
                )),
                Vector3::new(
                    rng.random_range(-0.2..0.2),
                    rng.random_range(-0.2..0.2),
                    rng.random_range(-0.2..0.2),
                ),
            );
            // The score is discontinuous across cell boundaries; keep the
            // probe points clear of them so the differences are smooth.
            let margin = 0.02;
            let scan = PointCloud::from_positions(
                raw_scan
                    .positions
                    .into_iter()
                    .filter(|raw| {
                        let p = pose.transform_point(raw);
                        p.iter().all(|c| {
                            let frac = c.rem_euclid(1.0);
                            frac > margin && frac < 1.0 - margin
                        })
                    })
                    .collect(),
            );

            let eval = score_pose(&grid, &scan, &pose);
            if eval.matched_points < 20 {
                continue;
            }
            let f = |delta: Vector6<f64>| -> f64 {
                let perturbed = pose.left_increment(
                    &delta.fixed_rows::<3>(0).into_owned(),
                    &delta.fixed_rows::<3>(3).into_owned(),
                );
                score_pose(&grid, &scan, &perturbed).score
            };

            // Central differences in the same chart.
            let h = 1e-6;
            let mut fd_grad = Vector6::zeros();
            for i in 0..6 {
                let mut dp = Vector6::zeros();
                dp[i] = h;
                fd_grad[i] = (f(dp) - f(-dp)) / (2.0 * h);
            }
            let rel = (fd_grad - eval.gradient).norm() / eval.gradient.norm().max(1e-12);
            assert!(rel < 1e-4, "trial {trial}: gradient rel err {rel}");

            let hh = 1e-4;
            let mut fd_hess = Matrix6::zeros();
            for i in 0..6 {
                for j in 0..6 {
                    let mut pp = Vector6::zeros();
                    pp[i] += hh;
                    pp[j] += hh;
                    let mut pm = Vector6::zeros();
                    pm[i] += hh;
                    pm[j] -= hh;
                    let mut mp = Vector6::zeros();
                    mp[i] -= hh;
                    mp[j] += hh;
                    let mut mm = Vector6::zeros();
                    mm[i] -= hh;
                    mm[j] -= hh;
                    fd_hess[(i, j)] = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * hh * hh);
                }
            }
            let rel_h = (fd_hess - eval.hessian).norm() / eval.hessian.norm().max(1e-12);
            assert!(rel_h < 1e-2, "trial {trial}: hessian rel err {rel_h}");
            checked += 1;
        }
        assert!(checked >= 15, "only {checked} trials had enough overlap");
    }

    #[test]
    fn score_peaks_at_the_generating_pose() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(24);
        let map = dense_random_cloud(8000, 30, 4.0);
        let grid = build_grid(&map, &NdtParams::default()).unwrap();
        // Scan drawn from the map itself.
        let scan = PointCloud::from_positions(map.positions[..500].to_vec());
        let at_truth = score_pose(&grid, &scan, &Pose::identity()).score;
        for _ in 0..20 {
            let dir = Vector3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0f64),
            )
            .normalize();
            let dist = rng.random_range(0.5..2.0);
            let perturbed = Pose::from_translation(
                dir.x * dist,
                dir.y * dist,
                dir.z * dist,
            );
            let moved = score_pose(&grid, &scan, &perturbed).score;
            assert!(moved < at_truth);
        }
    }
}
