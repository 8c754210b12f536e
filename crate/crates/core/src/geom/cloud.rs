//! Point-cloud container.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::geom::Pose;
use crate::scalar::Real;

/// A timestamped set of 3D points with an optional per-point intensity
/// channel. Positions are stored columnar; intensity, when present, is a
/// parallel vector of the same length.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointCloud<T: Real> {
    pub positions: Vec<Vector3<T>>,
    pub intensities: Option<Vec<T>>,
    /// Acquisition time in seconds.
    pub stamp: f64,
    /// Free-form frame label, e.g. "sensor" or "map".
    pub frame_id: String,
}

impl<T: Real> PointCloud<T> {
    pub fn new() -> Self {
        PointCloud {
            positions: Vec::new(),
            intensities: None,
            stamp: 0.0,
            frame_id: String::new(),
        }
    }

    pub fn from_positions(positions: Vec<Vector3<T>>) -> Self {
        PointCloud {
            positions,
            ..Self::new()
        }
    }

    /// Builds a cloud from raw points, dropping any with a non-finite
    /// coordinate. Intensity, if given, must be parallel to the points.
    pub fn from_raw(
        points: Vec<Vector3<T>>,
        intensities: Option<Vec<T>>,
        stamp: f64,
        frame_id: impl Into<String>,
    ) -> Result<Self> {
        if let Some(ints) = &intensities {
            if ints.len() != points.len() {
                return Err(Error::InvalidArgument(format!(
                    "intensity channel length {} does not match point count {}",
                    ints.len(),
                    points.len()
                )));
            }
        }
        let mut positions = Vec::with_capacity(points.len());
        let mut kept_intensities = intensities.as_ref().map(|_| Vec::with_capacity(points.len()));
        for (i, p) in points.into_iter().enumerate() {
            if p.x.is_finite() && p.y.is_finite() && p.z.is_finite() {
                positions.push(p);
                if let (Some(out), Some(src)) = (kept_intensities.as_mut(), intensities.as_ref()) {
                    out.push(src[i]);
                }
            }
        }
        Ok(PointCloud {
            positions,
            intensities: kept_intensities,
            stamp,
            frame_id: frame_id.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn with_stamp(mut self, stamp: f64) -> Self {
        self.stamp = stamp;
        self
    }

    pub fn with_frame_id(mut self, frame_id: impl Into<String>) -> Self {
        self.frame_id = frame_id.into();
        self
    }

    /// Appends all points (and intensities, if both sides carry them) of
    /// `other`. Mixing an intensity cloud into a plain one drops the channel.
    pub fn extend_from(&mut self, other: &PointCloud<T>) {
        self.positions.extend_from_slice(&other.positions);
        match (&mut self.intensities, &other.intensities) {
            (Some(dst), Some(src)) => dst.extend_from_slice(src),
            (Some(_), None) => self.intensities = None,
            _ => {}
        }
    }

    /// Keeps only the points at the given sorted, deduplicated indices.
    pub(crate) fn select(&self, indices: &[usize]) -> PointCloud<T> {
        PointCloud {
            positions: indices.iter().map(|&i| self.positions[i]).collect(),
            intensities: self
                .intensities
                .as_ref()
                .map(|ints| indices.iter().map(|&i| ints[i]).collect()),
            stamp: self.stamp,
            frame_id: self.frame_id.clone(),
        }
    }
}

/// Applies a rigid transform to every point; stamp and intensity are preserved.
pub fn transform_cloud<T: Real>(cloud: &PointCloud<T>, pose: &Pose<T>) -> PointCloud<T> {
    PointCloud {
        positions: cloud
            .positions
            .iter()
            .map(|p| pose.transform_point(p))
            .collect(),
        intensities: cloud.intensities.clone(),
        stamp: cloud.stamp,
        frame_id: cloud.frame_id.clone(),
    }
}
