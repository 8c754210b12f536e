//! Normal distributions transform: grid construction, scan scoring, and
//! alignment used to produce ground-truth poses against the prior map.

mod align;
mod grid;
mod score;

pub use align::{align, track_sequence, TrackResult};
pub use grid::{build_grid, MixtureConstants, NdtCell, NdtGrid, NdtParams};
pub use score::{score_pose, ScoreEval};
