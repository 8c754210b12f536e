//! IMU-gated stationary-state detection.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::traj::Trajectory;

/// One inertial measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImuSample {
    /// Seconds.
    pub stamp: f64,
    /// Specific force in the body frame, m/s² (gravity included).
    pub accel: Vector3<f64>,
    /// Angular rate in the body frame, rad/s.
    pub gyro: Vector3<f64>,
}

impl ImuSample {
    /// Checks finiteness and strict time ordering of a stream.
    pub fn validate_stream(samples: &[ImuSample]) -> Result<()> {
        for s in samples {
            if !(s.stamp.is_finite()
                && s.accel.iter().all(|v| v.is_finite())
                && s.gyro.iter().all(|v| v.is_finite()))
            {
                return Err(Error::Parse {
                    path: "imu stream".into(),
                    msg: format!("non-finite sample at t={}", s.stamp),
                });
            }
        }
        for w in samples.windows(2) {
            if w[1].stamp <= w[0].stamp {
                return Err(Error::UnorderedTimestamps(format!(
                    "imu stream: {} followed by {}",
                    w[0].stamp, w[1].stamp
                )));
            }
        }
        Ok(())
    }
}

/// Gating thresholds for declaring the platform stationary.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StationaryThresholds {
    /// Maximum per-axis standard deviation of acceleration about the
    /// window mean, m/s². The mean subtraction makes the test
    /// gravity-neutral.
    pub accel_dev_max: f64,
    /// Maximum per-axis instantaneous angular rate, rad/s.
    pub gyro_max: f64,
    /// Maximum odometry-estimated linear speed, m/s.
    pub lin_vel_max: f64,
    /// Segments shorter than this are dropped, seconds.
    pub min_duration: f64,
    /// Length of the sliding acceleration window, seconds.
    pub window_len: f64,
    /// Baseline over which odometry displacement is turned into speed,
    /// seconds. Zero means the raw bracketing sample interval; a few
    /// tenths of a second smooths pose jitter out of the speed estimate.
    pub speed_baseline: f64,
}

impl Default for StationaryThresholds {
    fn default() -> Self {
        StationaryThresholds {
            accel_dev_max: 0.01,
            gyro_max: 0.01,
            lin_vel_max: 0.01,
            min_duration: 0.5,
            window_len: 0.5,
            speed_baseline: 0.5,
        }
    }
}

impl StationaryThresholds {
    pub fn validate(&self) -> Result<()> {
        let all_positive = self.accel_dev_max > 0.0
            && self.gyro_max > 0.0
            && self.lin_vel_max > 0.0
            && self.min_duration > 0.0
            && self.window_len > 0.0;
        if !all_positive || self.speed_baseline < 0.0 {
            return Err(Error::InvalidArgument(
                "stationary thresholds must be positive (speed_baseline may be zero)".into(),
            ));
        }
        Ok(())
    }
}

/// A half-open time interval reported as `[t_start, t_end]` sample stamps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeSegment {
    pub t_start: f64,
    pub t_end: f64,
}

impl TimeSegment {
    pub fn duration(&self) -> f64 {
        self.t_end - self.t_start
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.t_start && t <= self.t_end
    }
}

/// Detects maximal time segments during which the platform is stationary.
///
/// A sample passes when (a) the per-axis standard deviation of
/// acceleration about the mean of its centered window stays below
/// `accel_dev_max`, (b) each instantaneous gyro component stays below
/// `gyro_max` in magnitude, and (c) the odometry speed at its stamp stays
/// below `lin_vel_max` (skipped when `odom` is `None`). Runs of passing
/// samples shorter than `min_duration` are dropped.
pub fn detect_stationary_segments(
    imu: &[ImuSample],
    odom: Option<&Trajectory>,
    th: &StationaryThresholds,
) -> Result<Vec<TimeSegment>> {
    th.validate()?;
    if imu.is_empty() {
        return Err(Error::EmptyInput("imu stream".into()));
    }
    ImuSample::validate_stream(imu)?;

    let n = imu.len();
    let half = th.window_len / 2.0;
    let mut passing = vec![false; n];
    let mut window_start = 0usize;
    let mut window_end = 0usize;

    for (i, sample) in imu.iter().enumerate() {
        // Advance the centered window [t - half, t + half].
        while imu[window_start].stamp < sample.stamp - half {
            window_start += 1;
        }
        while window_end < n && imu[window_end].stamp <= sample.stamp + half {
            window_end += 1;
        }
        let window = &imu[window_start..window_end];

        let accel_ok = accel_deviation_ok(window, th.accel_dev_max);
        let gyro_ok = sample.gyro.iter().all(|g| g.abs() < th.gyro_max);
        let speed_ok = match odom {
            Some(traj) => {
                odometry_speed(traj, sample.stamp, th.speed_baseline) < th.lin_vel_max
            }
            None => true,
        };
        passing[i] = accel_ok && gyro_ok && speed_ok;
    }

    let mut segments = Vec::new();
    let mut run_start: Option<usize> = None;
    for i in 0..=n {
        let flag = i < n && passing[i];
        match (run_start, flag) {
            (None, true) => run_start = Some(i),
            (Some(s), false) => {
                let seg = TimeSegment {
                    t_start: imu[s].stamp,
                    t_end: imu[i - 1].stamp,
                };
                if seg.duration() >= th.min_duration {
                    segments.push(seg);
                }
                run_start = None;
            }
            _ => {}
        }
    }
    Ok(segments)
}

fn accel_deviation_ok(window: &[ImuSample], dev_max: f64) -> bool {
    if window.len() < 2 {
        return true;
    }
    let count = window.len() as f64;
    let mean = window
        .iter()
        .fold(Vector3::zeros(), |acc: Vector3<f64>, s| acc + s.accel)
        / count;
    let var = window.iter().fold(Vector3::zeros(), |acc: Vector3<f64>, s| {
        let d = s.accel - mean;
        acc + d.component_mul(&d)
    }) / count;
    var.iter().all(|&v| v.sqrt() < dev_max)
}

/// Odometry speed at time `t`: displacement of the interpolated position
/// over a baseline of at least `baseline` seconds, centered on `t` and
/// clamped to the trajectory span.
fn odometry_speed(traj: &Trajectory, t: f64, baseline: f64) -> f64 {
    let Some((t_first, t_last)) = traj.time_span() else {
        return 0.0;
    };
    if traj.len() < 2 {
        return 0.0;
    }
    let half = if baseline > 0.0 {
        baseline / 2.0
    } else {
        // Raw local slope: use the bracketing sample interval.
        let poses = traj.poses();
        let hi = poses
            .partition_point(|p| p.stamp <= t)
            .clamp(1, poses.len() - 1);
        let (a, b) = (&poses[hi - 1], &poses[hi]);
        return a.translation_distance_to(b) / (b.stamp - a.stamp);
    };
    let (mut lo, mut hi) = (t - half, t + half);
    // Keep the full baseline width near the ends.
    if lo < t_first {
        hi += t_first - lo;
        lo = t_first;
    }
    if hi > t_last {
        lo -= hi - t_last;
        hi = t_last;
    }
    let lo = lo.max(t_first);
    let span = hi - lo;
    if span <= 0.0 {
        return 0.0;
    }
    let a = traj.interpolate_translation(lo).unwrap();
    let b = traj.interpolate_translation(hi).unwrap();
    (b - a).norm() / span
}
