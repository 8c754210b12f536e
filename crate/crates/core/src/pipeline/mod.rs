//! End-to-end ground-truth pipeline: stationary gating, submap
//! integration, GICP prior-map construction, denoising, and NDT
//! trajectory generation.

mod prior_map;
mod run;
mod stationary;
mod submap;

pub use prior_map::{build_prior_map, denoise_map, MergeEntry, PriorMap};
pub use run::{
    build_map_stage, generate_ground_truth, load_dataset, load_scan_dir, localize_stage,
    DataTiming, Dataset, MapStage, RunReport,
};
pub use stationary::{
    detect_stationary_segments, ImuSample, StationaryThresholds, TimeSegment,
};
pub use submap::{integrate_submap, Submap, SubmapCache, SubmapSummary};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ndt::NdtParams;
use crate::registration::{OdometryParams, RegParams};

/// Statistical denoising applied to the merged map.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DenoiseParams {
    /// Neighborhood size for the mean-distance statistic.
    pub k: usize,
    /// Threshold in standard deviations above the global mean.
    pub std_mult: f64,
}

impl Default for DenoiseParams {
    fn default() -> Self {
        DenoiseParams { k: 10, std_mult: 3.0 }
    }
}

/// Full pipeline configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub thresholds: StationaryThresholds,
    pub registration: RegParams,
    pub ndt: NdtParams,
    pub denoise: DenoiseParams,
    /// Leaf size of the merged map, meters.
    pub map_voxel_leaf: f64,
    /// Leaf size submaps are decimated to for merge registration, meters.
    pub merge_registration_leaf: f64,
    pub odometry: OdometryParams,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            thresholds: StationaryThresholds::default(),
            registration: RegParams::default(),
            ndt: NdtParams::default(),
            denoise: DenoiseParams::default(),
            map_voxel_leaf: 0.05,
            merge_registration_leaf: 0.1,
            odometry: OdometryParams::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.thresholds.validate()?;
        self.registration.validate()?;
        self.ndt.validate()?;
        self.odometry.validate()?;
        if self.denoise.k == 0 || self.denoise.std_mult < 0.0 {
            return Err(Error::InvalidArgument(
                "denoise needs k >= 1 and std_mult >= 0".into(),
            ));
        }
        if self.map_voxel_leaf <= 0.0 || self.merge_registration_leaf <= 0.0 {
            return Err(Error::InvalidArgument(
                "map and merge leaf sizes must be positive".into(),
            ));
        }
        Ok(())
    }
}
