//! Trajectory containers, timestamp association, rigid alignment, and
//! absolute position error statistics.

mod ape;
mod associate;
mod trajectory;
mod umeyama;

pub use ape::{
    apply_reference_transform, compute_ape, stationary_deviation, AlignMode, ApeOptions,
    ApeStats, StationaryDeviation,
};
pub use associate::associate_timestamps;
pub use trajectory::Trajectory;
pub use umeyama::umeyama_alignment;
