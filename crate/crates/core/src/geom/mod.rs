//! Pose algebra, point-cloud containers, spatial indexing, downsampling,
//! and denoising primitives.
//!
//! Everything here is an immutable value type after construction and all
//! operations are pure functions, so sharing across threads is safe.

mod cloud;
mod kdtree;
mod outlier;
mod pose;
mod voxel;

pub use cloud::{transform_cloud, PointCloud};
pub use kdtree::{KdTree, Neighbor};
pub use outlier::{remove_outliers, FilterOutcome};
pub use pose::Pose;
pub use voxel::{occupied_voxel_count, voxel_downsample, voxel_key};
