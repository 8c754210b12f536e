//! Synthetic IMU streams from a motion script.

use nalgebra::Vector3;
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::pipeline::ImuSample;
use crate::sim::MotionScript;

/// Standard gravity, m/s².
pub const GRAVITY: f64 = 9.81;

/// Samples the script at `rate` Hz. The accelerometer reports the
/// gravity reaction rotated into the body frame plus noise; the scripted
/// velocity steps at waypoints are treated as below sensor resolution
/// (desk-scale pushes), so no acceleration impulses are emitted. The
/// gyro reports the script's body angular rate plus noise.
///
/// `rate` must divide 1000 so sample stamps land on exact milliseconds.
pub fn synthesize_imu(
    script: &MotionScript,
    rate: f64,
    noise_accel: f64,
    noise_gyro: f64,
    seed: u64,
) -> Result<Vec<ImuSample>> {
    if rate <= 0.0 {
        return Err(Error::InvalidArgument("imu rate must be positive".into()));
    }
    let period_ms = 1000.0 / rate;
    if (period_ms - period_ms.round()).abs() > 1e-9 || period_ms < 1.0 {
        return Err(Error::InvalidArgument(format!(
            "imu rate {rate} Hz does not give an integer millisecond period"
        )));
    }
    let period_ms = period_ms.round() as i64;
    if noise_accel < 0.0 || noise_gyro < 0.0 {
        return Err(Error::InvalidArgument("imu noise must be nonnegative".into()));
    }

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let accel_noise = (noise_accel > 0.0)
        .then(|| Normal::new(0.0, noise_accel).expect("finite sigma"));
    let gyro_noise =
        (noise_gyro > 0.0).then(|| Normal::new(0.0, noise_gyro).expect("finite sigma"));
    let draw = |n: &Option<Normal<f64>>, rng: &mut rand_chacha::ChaCha8Rng| match n {
        Some(d) => Vector3::new(d.sample(rng), d.sample(rng), d.sample(rng)),
        None => Vector3::zeros(),
    };

    let (t0, t1) = script.time_span();
    let start_ms = (t0 * 1000.0).round() as i64;
    let end_ms = (t1 * 1000.0).round() as i64;
    let gravity_world = Vector3::new(0.0, 0.0, GRAVITY);

    let mut samples = Vec::new();
    let mut t_ms = start_ms;
    while t_ms <= end_ms {
        let t = t_ms as f64 / 1000.0;
        let pose = script.pose_at(t);
        let accel = pose.rotation.inverse() * gravity_world + draw(&accel_noise, &mut rng);
        let gyro = script.body_angular_velocity_at(t) + draw(&gyro_noise, &mut rng);
        samples.push(ImuSample {
            stamp: t,
            accel,
            gyro,
        });
        t_ms += period_ms;
    }
    Ok(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Pose;
    use crate::pipeline::{detect_stationary_segments, StationaryThresholds};
    use crate::sim::Waypoint;
    use crate::traj::Trajectory;

    #[test]
    fn zero_motion_zero_noise_reads_pure_gravity() {
        let script = MotionScript::stationary(Pose::identity(), 0.0, 2.0).unwrap();
        let samples = synthesize_imu(&script, 100.0, 0.0, 0.0, 1).unwrap();
        assert_eq!(samples.len(), 201);
        for s in &samples {
            assert_eq!(s.accel, Vector3::new(0.0, 0.0, GRAVITY));
            assert_eq!(s.gyro, Vector3::zeros());
        }
    }

    #[test]
    fn constant_velocity_straightaway_reads_gravity_only() {
        let script = MotionScript::new(vec![
            Waypoint {
                t: 0.0,
                pose: Pose::from_translation(0.0, 0.0, 0.0),
            },
            Waypoint {
                t: 5.0,
                pose: Pose::from_translation(10.0, 0.0, 0.0),
            },
        ])
        .unwrap();
        let samples = synthesize_imu(&script, 100.0, 0.0, 0.0, 2).unwrap();
        for s in &samples {
            assert_eq!(s.accel, Vector3::new(0.0, 0.0, GRAVITY));
            assert_eq!(s.gyro, Vector3::zeros());
        }
    }

    #[test]
    fn tilted_pose_rotates_gravity_into_the_body_frame() {
        let tilt = Pose::from_axis_angle(Vector3::x(), 0.5);
        let script = MotionScript::stationary(tilt, 0.0, 1.0).unwrap();
        let samples = synthesize_imu(&script, 100.0, 0.0, 0.0, 3).unwrap();
        let expected = tilt.rotation.inverse() * Vector3::new(0.0, 0.0, GRAVITY);
        for s in &samples {
            assert!((s.accel - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn non_millisecond_rates_are_rejected() {
        let script = MotionScript::stationary(Pose::identity(), 0.0, 1.0).unwrap();
        assert!(synthesize_imu(&script, 333.0, 0.0, 0.0, 0).is_err());
        assert!(synthesize_imu(&script, 0.0, 0.0, 0.0, 0).is_err());
    }

    /// Closed loop with the stationary detector: a stop-and-go script with
    /// exact odometry sampled at IMU rate is recovered to the sample.
    #[test]
    fn detector_recovers_stop_windows_within_one_sample() {
        let script = MotionScript::stop_and_go(
            &[
                Vector3::new(0.0, 0.0, 0.0),
                Vector3::new(3.0, 0.0, 0.0),
                Vector3::new(3.0, 3.0, 0.0),
                Vector3::new(6.0, 3.0, 0.0),
            ],
            nalgebra::UnitQuaternion::identity(),
            1.0,
            2.0,
            0.0,
        )
        .unwrap();
        let rate = 100.0;
        let dt = 1.0 / rate;
        let samples = synthesize_imu(&script, rate, 0.002, 0.002, 11).unwrap();

        // Exact odometry at IMU rate.
        let odom = Trajectory::from_poses(
            samples.iter().map(|s| script.pose_at(s.stamp)).collect(),
        )
        .unwrap();

        let th = StationaryThresholds {
            speed_baseline: 0.0,
            ..StationaryThresholds::default()
        };
        let segments = detect_stationary_segments(&samples, Some(&odom), &th).unwrap();
        let stops = script.stop_windows();
        assert_eq!(segments.len(), stops.len());
        for (seg, stop) in segments.iter().zip(stops) {
            assert!(
                (seg.t_start - stop.0).abs() <= dt + 1e-9,
                "start {} vs {}",
                seg.t_start,
                stop.0
            );
            assert!(
                (seg.t_end - stop.1).abs() <= dt + 1e-9,
                "end {} vs {}",
                seg.t_end,
                stop.1
            );
        }
    }
}
