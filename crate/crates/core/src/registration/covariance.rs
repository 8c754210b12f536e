//! Per-point surface covariance estimation for generalized ICP.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::geom::{KdTree, PointCloud};
use crate::scalar::Real;

/// Raw sample covariance of each point's `k`-nearest neighborhood (the
/// point itself included), normalized by `k`. Requires at least `k + 1`
/// points so every neighborhood contains a point other than the query.
pub fn knn_covariances<T: Real>(cloud: &PointCloud<T>, k: usize) -> Result<Vec<Matrix3<T>>> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "covariance estimation requires k >= 1".into(),
        ));
    }
    if cloud.len() < k + 1 {
        return Err(Error::InsufficientData(format!(
            "covariance estimation needs at least {} points, got {}",
            k + 1,
            cloud.len()
        )));
    }
    let tree = KdTree::build(&cloud.positions);
    let inv_k = T::one() / T::from_f64_c(k as f64);
    let mut covs = Vec::with_capacity(cloud.len());
    for p in &cloud.positions {
        let neighbors = tree.knn(p, k)?;
        let mut mean = Vector3::zeros();
        for nb in &neighbors {
            mean += cloud.positions[nb.index];
        }
        mean *= inv_k;
        let mut cov = Matrix3::zeros();
        for nb in &neighbors {
            let d = cloud.positions[nb.index] - mean;
            cov += d * d.transpose();
        }
        covs.push(cov * inv_k);
    }
    Ok(covs)
}

/// Plane-disk regularization: keep the eigenbasis, replace the
/// eigenvalues with `(1, 1, epsilon)` from largest to smallest. The
/// result is symmetric positive-definite for any input.
pub fn regularize_plane_disk<T: Real>(cov: &Matrix3<T>, epsilon: T) -> Matrix3<T> {
    let eig = cov.symmetric_eigen();
    // Sort eigenpairs by descending eigenvalue.
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let values = [T::one(), T::one(), epsilon];
    let mut out = Matrix3::zeros();
    for (rank, &col) in order.iter().enumerate() {
        let v = eig.eigenvectors.column(col);
        out += v * v.transpose() * values[rank];
    }
    out
}

/// k-NN covariances with plane-disk regularization applied, the input
/// GICP expects.
pub fn estimate_covariances<T: Real>(
    cloud: &PointCloud<T>,
    k: usize,
    cov_epsilon: T,
) -> Result<Vec<Matrix3<T>>> {
    Ok(knn_covariances(cloud, k)?
        .iter()
        .map(|c| regularize_plane_disk(c, cov_epsilon))
        .collect())
}
