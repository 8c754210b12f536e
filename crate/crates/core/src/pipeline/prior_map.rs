//! Prior-map construction: place each submap with its odometry pose,
//! refine with GICP against the growing map, merge, downsample, denoise.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{remove_outliers, transform_cloud, voxel_downsample, KdTree, PointCloud};
use crate::pipeline::{PipelineConfig, SubmapCache};
use crate::registration::{evaluate_alignment, gicp_align, RegResult};

/// One row of the merge report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MergeEntry {
    pub index: usize,
    /// Inlier RMSE of the odometry placement before refinement (absent
    /// for the seeding submap).
    pub initial_rmse: Option<f64>,
    /// Refinement outcome (absent for the seeding submap).
    pub refinement: Option<RegResult<f64>>,
    pub merged: bool,
    pub skip_reason: Option<String>,
}

/// Merged ground-truth map.
#[derive(Debug, Clone)]
pub struct PriorMap {
    pub cloud: PointCloud<f64>,
    /// Submaps actually merged.
    pub submap_count: usize,
    pub merge_report: Vec<MergeEntry>,
    /// Points dropped by [`denoise_map`], once it has run.
    pub denoise_removed: Option<usize>,
}

/// Algorithm: the first submap placed at its odometry pose seeds the map
/// frame; every later submap is placed at its odometry pose (initial
/// guess), refined by GICP against the current map, transformed by the
/// refined pose, merged, and the map re-downsampled. Submaps whose
/// refinement fails are skipped and flagged, not merged.
pub fn build_prior_map(cache: &SubmapCache, cfg: &PipelineConfig) -> Result<PriorMap> {
    cfg.validate()?;
    if cache.is_empty() {
        return Err(Error::EmptyInput("submap cache is empty".into()));
    }

    let submaps = cache.submaps();
    let mut merge_report = Vec::with_capacity(submaps.len());
    let mut map = voxel_downsample(
        &transform_cloud(&submaps[0].cloud, &submaps[0].pose),
        cfg.map_voxel_leaf,
    )?
    .with_frame_id("map");
    merge_report.push(MergeEntry {
        index: 0,
        initial_rmse: None,
        refinement: None,
        merged: true,
        skip_reason: None,
    });
    let mut merged_count = 1usize;

    for (index, submap) in submaps.iter().enumerate().skip(1) {
        // Register a decimated copy; merge the full-resolution cloud.
        let source = voxel_downsample(&submap.cloud, cfg.merge_registration_leaf)?;
        let tree = KdTree::build(&map.positions);
        let (_, initial_rmse) = evaluate_alignment(
            &tree,
            &source.positions,
            &submap.pose,
            cfg.registration.max_corr_dist,
        );

        match gicp_align(&source, &map, &submap.pose, &cfg.registration) {
            Ok(refinement) => {
                let placed = transform_cloud(&submap.cloud, &refinement.pose);
                map.extend_from(&placed);
                map = voxel_downsample(&map, cfg.map_voxel_leaf)?;
                merged_count += 1;
                merge_report.push(MergeEntry {
                    index,
                    initial_rmse: Some(initial_rmse),
                    refinement: Some(refinement),
                    merged: true,
                    skip_reason: None,
                });
            }
            Err(e @ (Error::NoOverlap | Error::SingularSystem | Error::InsufficientData(_))) => {
                log::warn!("submap {index} not merged: {e}");
                merge_report.push(MergeEntry {
                    index,
                    initial_rmse: Some(initial_rmse),
                    refinement: None,
                    merged: false,
                    skip_reason: Some(e.kind().to_string()),
                });
            }
            Err(e) => return Err(e),
        }
    }

    Ok(PriorMap {
        cloud: map,
        submap_count: merged_count,
        merge_report,
        denoise_removed: None,
    })
}

/// Statistical outlier removal over the merged map.
pub fn denoise_map(map: &PriorMap, cfg: &PipelineConfig) -> Result<PriorMap> {
    let outcome = remove_outliers(&map.cloud, cfg.denoise.k, cfg.denoise.std_mult)?;
    if outcome.too_small {
        log::warn!("denoise skipped: map too small to filter");
    }
    Ok(PriorMap {
        cloud: outcome.cloud,
        submap_count: map.submap_count,
        merge_report: map.merge_report.clone(),
        denoise_removed: Some(outcome.removed),
    })
}
