//! Piecewise-constant-velocity motion scripts with explicit stop windows.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::geom::Pose;

#[derive(Debug, Clone, Copy)]
pub struct Waypoint {
    pub t: f64,
    pub pose: Pose<f64>,
}

/// A trajectory defined by waypoints; between consecutive waypoints the
/// translation interpolates linearly and the rotation slerps, so both
/// linear and body angular velocity are piecewise constant. Stop windows
/// (zero velocity) are derived from runs of identical consecutive poses.
#[derive(Debug, Clone)]
pub struct MotionScript {
    waypoints: Vec<Waypoint>,
    stop_windows: Vec<(f64, f64)>,
}

impl MotionScript {
    pub fn new(waypoints: Vec<Waypoint>) -> Result<Self> {
        if waypoints.is_empty() {
            return Err(Error::EmptyInput("motion script needs waypoints".into()));
        }
        for w in waypoints.windows(2) {
            if w[1].t <= w[0].t {
                return Err(Error::UnorderedTimestamps(format!(
                    "waypoints at {} then {}",
                    w[0].t, w[1].t
                )));
            }
        }
        let mut stop_windows: Vec<(f64, f64)> = Vec::new();
        for w in waypoints.windows(2) {
            let still = w[0].pose.translation_distance_to(&w[1].pose) < 1e-12
                && w[0].pose.rotation_angle_to(&w[1].pose) < 1e-12;
            if still {
                match stop_windows.last_mut() {
                    Some(last) if last.1 == w[0].t => last.1 = w[1].t,
                    _ => stop_windows.push((w[0].t, w[1].t)),
                }
            }
        }
        Ok(MotionScript {
            waypoints,
            stop_windows,
        })
    }

    /// A platform parked at `pose` for `duration` seconds from `t0`.
    pub fn stationary(pose: Pose<f64>, t0: f64, duration: f64) -> Result<Self> {
        Self::new(vec![
            Waypoint { t: t0, pose },
            Waypoint {
                t: t0 + duration,
                pose,
            },
        ])
    }

    /// Visits `stations` in order at constant `speed`, pausing `pause`
    /// seconds at each (including the first). Orientation is fixed.
    pub fn stop_and_go(
        stations: &[Vector3<f64>],
        orientation: nalgebra::UnitQuaternion<f64>,
        speed: f64,
        pause: f64,
        t0: f64,
    ) -> Result<Self> {
        let with_yaw: Vec<(Vector3<f64>, nalgebra::UnitQuaternion<f64>)> =
            stations.iter().map(|p| (*p, orientation)).collect();
        Self::patrol(&with_yaw, speed, pause, t0)
    }

    /// Like [`Self::stop_and_go`] with a per-station orientation; the
    /// platform turns while traveling (slerp) and holds the pose during
    /// each pause.
    pub fn patrol(
        stations: &[(Vector3<f64>, nalgebra::UnitQuaternion<f64>)],
        speed: f64,
        pause: f64,
        t0: f64,
    ) -> Result<Self> {
        if stations.is_empty() {
            return Err(Error::EmptyInput("patrol needs stations".into()));
        }
        if speed <= 0.0 || pause <= 0.0 {
            return Err(Error::InvalidArgument(
                "patrol speed and pause must be positive".into(),
            ));
        }
        let mut waypoints = Vec::new();
        let mut t = t0;
        for (i, (p, q)) in stations.iter().enumerate() {
            let pose = Pose::from_parts(*q, *p);
            waypoints.push(Waypoint { t, pose });
            t += pause;
            waypoints.push(Waypoint { t, pose });
            if let Some((next, _)) = stations.get(i + 1) {
                t += (next - p).norm().max(1e-3) / speed;
            }
        }
        Self::new(waypoints)
    }

    pub fn waypoints(&self) -> &[Waypoint] {
        &self.waypoints
    }

    pub fn stop_windows(&self) -> &[(f64, f64)] {
        &self.stop_windows
    }

    pub fn time_span(&self) -> (f64, f64) {
        (
            self.waypoints.first().unwrap().t,
            self.waypoints.last().unwrap().t,
        )
    }

    /// Index of the segment `[t_k, t_{k+1})` containing `t`, clamped.
    fn segment(&self, t: f64) -> usize {
        if self.waypoints.len() < 2 {
            return 0;
        }
        let hi = self
            .waypoints
            .partition_point(|w| w.t <= t)
            .clamp(1, self.waypoints.len() - 1);
        hi - 1
    }

    pub fn pose_at(&self, t: f64) -> Pose<f64> {
        let (t0, t1) = self.time_span();
        if self.waypoints.len() == 1 || t <= t0 {
            return self.waypoints[0].pose.with_stamp(t);
        }
        if t >= t1 {
            return self.waypoints.last().unwrap().pose.with_stamp(t);
        }
        let k = self.segment(t);
        let (a, b) = (&self.waypoints[k], &self.waypoints[k + 1]);
        let alpha = (t - a.t) / (b.t - a.t);
        let translation = a.pose.translation + (b.pose.translation - a.pose.translation) * alpha;
        let rotation = a.pose.rotation.slerp(&b.pose.rotation, alpha);
        Pose::new(t, rotation, translation)
    }

    /// World-frame linear velocity of the segment containing `t`
    /// (zero outside the scripted span).
    pub fn velocity_at(&self, t: f64) -> Vector3<f64> {
        let (t0, t1) = self.time_span();
        if self.waypoints.len() < 2 || t < t0 || t >= t1 {
            return Vector3::zeros();
        }
        let k = self.segment(t);
        let (a, b) = (&self.waypoints[k], &self.waypoints[k + 1]);
        (b.pose.translation - a.pose.translation) / (b.t - a.t)
    }

    /// Body-frame angular velocity of the segment containing `t`; constant
    /// along a slerp.
    pub fn body_angular_velocity_at(&self, t: f64) -> Vector3<f64> {
        let (t0, t1) = self.time_span();
        if self.waypoints.len() < 2 || t < t0 || t >= t1 {
            return Vector3::zeros();
        }
        let k = self.segment(t);
        let (a, b) = (&self.waypoints[k], &self.waypoints[k + 1]);
        (a.pose.rotation.inverse() * b.pose.rotation).scaled_axis() / (b.t - a.t)
    }
}
