pub mod build_map;
pub mod eval;
pub mod localize;
pub mod monitor;
pub mod odometry;
pub mod scripts;
pub mod simulate;
