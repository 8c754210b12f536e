//! File formats: PCD point clouds, TUM trajectories, IMU CSV streams.

pub mod imu_csv;
pub mod pcd;
pub mod tum;

pub use imu_csv::{read_imu_csv, write_imu_csv};
pub use pcd::{read_pcd, read_pcd_point_count, write_pcd, PcdEncoding};
pub use tum::{read_tum, write_tum};
