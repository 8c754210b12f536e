//! Stamped pose sequences.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::geom::Pose;

/// An ordered sequence of stamped poses with strictly increasing timestamps.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    poses: Vec<Pose<f64>>,
}

impl Trajectory {
    /// Validates that stamps strictly increase.
    pub fn from_poses(poses: Vec<Pose<f64>>) -> Result<Self> {
        for w in poses.windows(2) {
            if w[1].stamp <= w[0].stamp {
                return Err(Error::UnorderedTimestamps(format!(
                    "{} followed by {}",
                    w[0].stamp, w[1].stamp
                )));
            }
        }
        Ok(Trajectory { poses })
    }

    pub fn poses(&self) -> &[Pose<f64>] {
        &self.poses
    }

    pub fn len(&self) -> usize {
        self.poses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poses.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<&Pose<f64>> {
        self.poses.get(i)
    }

    pub fn first(&self) -> Option<&Pose<f64>> {
        self.poses.first()
    }

    pub fn last(&self) -> Option<&Pose<f64>> {
        self.poses.last()
    }

    pub fn stamps(&self) -> impl Iterator<Item = f64> + '_ {
        self.poses.iter().map(|p| p.stamp)
    }

    /// Time span `[first, last]`, or `None` when empty.
    pub fn time_span(&self) -> Option<(f64, f64)> {
        Some((self.first()?.stamp, self.last()?.stamp))
    }

    /// Translation linearly interpolated at `t`, clamped to the ends.
    pub fn interpolate_translation(&self, t: f64) -> Option<Vector3<f64>> {
        let first = self.first()?;
        if self.len() == 1 || t <= first.stamp {
            return Some(first.translation);
        }
        let last = self.last()?;
        if t >= last.stamp {
            return Some(last.translation);
        }
        // First pose with stamp > t; its predecessor starts the bracket.
        let hi = self.poses.partition_point(|p| p.stamp <= t);
        let (a, b) = (&self.poses[hi - 1], &self.poses[hi]);
        let alpha = (t - a.stamp) / (b.stamp - a.stamp);
        Some(a.translation + (b.translation - a.translation) * alpha)
    }

    /// Poses whose stamps fall inside `[t0, t1]`.
    pub fn slice_by_time(&self, t0: f64, t1: f64) -> &[Pose<f64>] {
        let start = self.poses.partition_point(|p| p.stamp < t0);
        let end = self.poses.partition_point(|p| p.stamp <= t1);
        &self.poses[start..end]
    }
}
