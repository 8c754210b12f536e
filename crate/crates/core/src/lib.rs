//! Ground-truth generation and evaluation toolkit for multi-modal lidar rigs.
//!
//! The crate covers the full desk-scale loop:
//!
//! * [`geom`] — pose algebra, point-cloud containers, k-d tree search,
//!   voxel downsampling and statistical denoising,
//! * [`registration`] — point-to-point ICP, generalized ICP, and a
//!   scan-to-map incremental odometry,
//! * [`ndt`] — normal-distributions-transform map representation and
//!   scan alignment,
//! * [`pipeline`] — IMU-gated submap integration and prior-map
//!   construction, plus the end-to-end ground-truth run,
//! * [`traj`] — trajectory association, rigid alignment, and absolute
//!   position error statistics,
//! * [`sim`] — a synthetic spinning/solid-state lidar and IMU dataset
//!   generator with exact ground truth,
//! * [`bench`] — child-process CPU/RSS sampling and pose-rate
//!   measurement,
//! * [`io`] — PCD, TUM, and IMU CSV readers/writers.
//!
//! Core geometry and registration are generic over the scalar type via
//! [`Real`]; the `*D`/`*F` aliases below pin `f64`/`f32`.

pub mod bench;
pub mod error;
pub mod geom;
pub mod io;
pub mod ndt;
pub mod pipeline;
pub mod registration;
pub mod scalar;
pub mod sim;
pub mod traj;

pub use error::{Error, Result};
pub use scalar::Real;

/// `f64` pose, the precision used by the pipeline and all file formats.
pub type PoseD = geom::Pose<f64>;
/// `f32` pose.
pub type PoseF = geom::Pose<f32>;
/// `f64` point cloud.
pub type PointCloudD = geom::PointCloud<f64>;
/// `f32` point cloud.
pub type PointCloudF = geom::PointCloud<f32>;
/// `f64` k-d tree.
pub type KdTreeD = geom::KdTree<f64>;
/// `f32` k-d tree.
pub type KdTreeF = geom::KdTree<f32>;
