//! Synthetic multi-modal lidar and IMU dataset generator with exact
//! ground truth, for desk-scale validation of the pipeline.

mod dataset;
mod imu;
mod motion;
mod scene;
mod sensor;

pub use dataset::{
    export_dataset, frame_seed, DatasetManifest, DatasetPaths, ScriptSummary, SensorRig,
};
pub use imu::{synthesize_imu, GRAVITY};
pub use motion::{MotionScript, Waypoint};
pub use scene::{Rect, Scene};
pub use sensor::{simulate_solid_state_scan, simulate_spinning_scan, SensorKind, SensorSpec};
