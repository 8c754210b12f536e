//! Voxel-grid downsampling.

use std::collections::HashMap;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::geom::PointCloud;
use crate::scalar::Real;

/// Integer voxel key of a point: `floor(coord / leaf)` per axis. A point
/// exactly on a voxel boundary lands in the higher-index voxel.
pub fn voxel_key<T: Real>(p: &Vector3<T>, leaf: T) -> (i32, i32, i32) {
    let f = |v: T| (v / leaf).floor().to_f64_c() as i32;
    (f(p.x), f(p.y), f(p.z))
}

/// Replaces each occupied voxel by the centroid of its member points
/// (and the mean of their intensities, when present). Output voxels are
/// ordered by first occurrence, and per-voxel sums accumulate in point
/// index order, so the result is deterministic.
pub fn voxel_downsample<T: Real>(cloud: &PointCloud<T>, leaf: T) -> Result<PointCloud<T>> {
    if leaf <= T::zero() {
        return Err(Error::InvalidArgument(format!(
            "voxel leaf must be positive, got {}",
            leaf.to_f64_c()
        )));
    }

    struct Acc<T> {
        sum: Vector3<T>,
        intensity_sum: T,
        count: usize,
        slot: usize,
    }

    let mut buckets: HashMap<(i32, i32, i32), Acc<T>> = HashMap::new();
    let mut slot_order = 0usize;
    for (i, p) in cloud.positions.iter().enumerate() {
        let key = voxel_key(p, leaf);
        let intensity = cloud
            .intensities
            .as_ref()
            .map(|ints| ints[i])
            .unwrap_or_else(T::zero);
        buckets
            .entry(key)
            .and_modify(|acc| {
                acc.sum += p;
                acc.intensity_sum += intensity;
                acc.count += 1;
            })
            .or_insert_with(|| {
                let slot = slot_order;
                slot_order += 1;
                Acc {
                    sum: *p,
                    intensity_sum: intensity,
                    count: 1,
                    slot,
                }
            });
    }

    let mut accs: Vec<Acc<T>> = buckets.into_values().collect();
    accs.sort_by_key(|a| a.slot);

    let mut positions = Vec::with_capacity(accs.len());
    let mut intensities = cloud.intensities.as_ref().map(|_| Vec::with_capacity(accs.len()));
    for acc in accs {
        let n = T::from_f64_c(acc.count as f64);
        positions.push(acc.sum / n);
        if let Some(ints) = intensities.as_mut() {
            ints.push(acc.intensity_sum / n);
        }
    }

    Ok(PointCloud {
        positions,
        intensities,
        stamp: cloud.stamp,
        frame_id: cloud.frame_id.clone(),
    })
}

/// Number of distinct voxels the cloud occupies at the given leaf size.
pub fn occupied_voxel_count<T: Real>(cloud: &PointCloud<T>, leaf: T) -> usize {
    let mut keys: Vec<(i32, i32, i32)> = cloud
        .positions
        .iter()
        .map(|p| voxel_key(p, leaf))
        .collect();
    keys.sort_unstable();
    keys.dedup();
    keys.len()
}
