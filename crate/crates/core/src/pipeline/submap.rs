//! Stationary submap integration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{PointCloud, Pose};

/// Frames gathered while the platform stood still, concatenated in the
/// shared body frame, tagged with the odometry pose to place them in the
/// map.
#[derive(Debug, Clone)]
pub struct Submap {
    pub cloud: PointCloud<f64>,
    pub pose: Pose<f64>,
    pub frame_count: usize,
    pub t_start: f64,
    pub t_end: f64,
}

impl Submap {
    pub fn with_pose(mut self, pose: Pose<f64>) -> Self {
        self.pose = pose;
        self
    }
}

/// Compact description of a submap for run reports.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubmapSummary {
    pub frame_count: usize,
    pub point_count: usize,
    pub t_start: f64,
    pub t_end: f64,
}

impl From<&Submap> for SubmapSummary {
    fn from(s: &Submap) -> Self {
        SubmapSummary {
            frame_count: s.frame_count,
            point_count: s.cloud.len(),
            t_start: s.t_start,
            t_end: s.t_end,
        }
    }
}

/// Time-ordered collection of submaps.
#[derive(Debug, Clone, Default)]
pub struct SubmapCache {
    submaps: Vec<Submap>,
}

impl SubmapCache {
    pub fn new(submaps: Vec<Submap>) -> Result<Self> {
        for w in submaps.windows(2) {
            if w[1].t_start < w[0].t_end {
                return Err(Error::UnorderedTimestamps(
                    "submaps overlap or are out of order".into(),
                ));
            }
        }
        Ok(SubmapCache { submaps })
    }

    pub fn submaps(&self) -> &[Submap] {
        &self.submaps
    }

    pub fn len(&self) -> usize {
        self.submaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.submaps.is_empty()
    }
}

/// Concatenates the frames of one stationary segment. The platform is
/// still, so no motion compensation is applied; the result lives in the
/// shared body frame and its pose is assigned by the caller.
pub fn integrate_submap(frames: &[PointCloud<f64>]) -> Result<Submap> {
    if frames.is_empty() {
        return Err(Error::EmptyInput("submap integration needs frames".into()));
    }
    for w in frames.windows(2) {
        if w[1].stamp <= w[0].stamp {
            return Err(Error::UnorderedTimestamps(format!(
                "submap frames at {} then {}",
                w[0].stamp, w[1].stamp
            )));
        }
    }
    let mut cloud = frames[0].clone();
    for frame in &frames[1..] {
        cloud.extend_from(frame);
    }
    Ok(Submap {
        pose: Pose::identity(),
        frame_count: frames.len(),
        t_start: frames[0].stamp,
        t_end: frames[frames.len() - 1].stamp,
        cloud,
    })
}
