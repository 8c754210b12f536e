//! Statistical outlier removal.

use crate::error::Result;
use crate::geom::{KdTree, PointCloud};
use crate::scalar::Real;

/// Outcome of [`remove_outliers`].
#[derive(Debug, Clone)]
pub struct FilterOutcome<T: Real> {
    pub cloud: PointCloud<T>,
    /// Number of points dropped.
    pub removed: usize,
    /// Set when the cloud was too small to filter and was returned unchanged.
    pub too_small: bool,
}

/// Drops points whose mean distance to their `k` nearest neighbors
/// (excluding the point itself) exceeds `global mean + std_mult * global std`
/// of that statistic. Clouds with fewer than `k + 1` points are returned
/// unchanged with the `too_small` flag set.
pub fn remove_outliers<T: Real>(
    cloud: &PointCloud<T>,
    k: usize,
    std_mult: T,
) -> Result<FilterOutcome<T>> {
    if k == 0 {
        return Err(crate::error::Error::InvalidArgument(
            "outlier filter requires k >= 1".into(),
        ));
    }
    if cloud.len() < k + 1 {
        log::warn!(
            "outlier filter skipped: cloud has {} points, needs at least {}",
            cloud.len(),
            k + 1
        );
        return Ok(FilterOutcome {
            cloud: cloud.clone(),
            removed: 0,
            too_small: true,
        });
    }

    let tree = KdTree::build(&cloud.positions);
    let n = cloud.len();
    let mut mean_dists = Vec::with_capacity(n);
    for p in &cloud.positions {
        // k + 1 results: the first is the point itself at distance zero.
        let neighbors = tree.knn(p, k + 1)?;
        let mut sum = T::zero();
        for nb in neighbors.iter().skip(1) {
            sum += nb.distance;
        }
        mean_dists.push(sum / T::from_f64_c(k as f64));
    }

    let count = T::from_f64_c(n as f64);
    let mean = mean_dists.iter().fold(T::zero(), |acc, &d| acc + d) / count;
    let var = mean_dists
        .iter()
        .fold(T::zero(), |acc, &d| acc + (d - mean) * (d - mean))
        / count;
    let threshold = mean + std_mult * var.sqrt();

    let keep: Vec<usize> = (0..n).filter(|&i| mean_dists[i] <= threshold).collect();
    let removed = n - keep.len();
    Ok(FilterOutcome {
        cloud: cloud.select(&keep),
        removed,
        too_small: false,
    })
}
