//! Canonical motion scripts per scene preset.

use gtforge_core::error::{Error, Result};
use gtforge_core::geom::Pose;
use gtforge_core::sim::MotionScript;
use nalgebra::{UnitQuaternion, Vector3};

fn yaw(deg: f64) -> UnitQuaternion<f64> {
    UnitQuaternion::from_axis_angle(&Vector3::z_axis(), deg.to_radians())
}

fn parked_pose(scene: &str) -> Result<Pose<f64>> {
    Ok(match scene {
        "room_10x8x3" => Pose::from_parts(yaw(-20.0), Vector3::new(4.0, 4.0, 1.5)),
        "corridor_40m" => Pose::from_parts(yaw(0.0), Vector3::new(2.5, 1.5, 1.2)),
        "open_road" => Pose::from_parts(yaw(0.0), Vector3::new(0.0, 0.0, 1.8)),
        "forest" => Pose::from_parts(yaw(0.0), Vector3::new(0.0, 0.0, 1.3)),
        other => {
            return Err(Error::InvalidArgument(format!(
                "no canonical pose for scene {other:?}"
            )))
        }
    })
}

/// Builds the named script for a scene. `duration` applies to
/// `stationary` only.
pub fn canonical(scene: &str, script: &str, duration: Option<f64>) -> Result<MotionScript> {
    match script {
        "stationary" => {
            let duration = duration.unwrap_or(10.0);
            if duration <= 0.0 {
                return Err(Error::InvalidArgument("duration must be positive".into()));
            }
            MotionScript::stationary(parked_pose(scene)?, 0.0, duration)
        }
        "tour" => {
            if duration.is_some() {
                return Err(Error::InvalidArgument(
                    "--duration only applies to the stationary script".into(),
                ));
            }
            tour(scene)
        }
        other => Err(Error::InvalidArgument(format!(
            "unknown script {other:?}; available: stationary, tour"
        ))),
    }
}

/// Stop-and-go survey tour. Stances keep consecutive solid-state cones
/// overlapping and pointed at far corners so every merge is constrained.
fn tour(scene: &str) -> Result<MotionScript> {
    match scene {
        "room_10x8x3" => MotionScript::patrol(
            &[
                (Vector3::new(3.0, 3.0, 1.4), yaw(-15.0)),
                (Vector3::new(4.5, 3.2, 1.6), yaw(5.0)),
                (Vector3::new(6.0, 4.0, 1.4), yaw(15.0)),
                (Vector3::new(6.0, 5.0, 1.6), yaw(40.0)),
                (Vector3::new(4.5, 5.5, 1.5), yaw(60.0)),
                (Vector3::new(3.0, 5.0, 1.4), yaw(110.0)),
                (Vector3::new(3.5, 4.5, 1.6), yaw(215.0)),
                (Vector3::new(3.0, 3.2, 1.5), yaw(250.0)),
            ],
            0.3,
            2.5,
            0.0,
        ),
        "corridor_40m" => {
            // Stops fall between the doorway frames (which sit at
            // x = 2.5 + 5k); a stop exactly in a frame plane would see
            // its nearest axial surfaces edge-on.
            let stations: Vec<_> = (0..8)
                .map(|i| (Vector3::new(4.0 + 5.0 * i as f64, 1.5, 1.2), yaw(0.0)))
                .collect();
            MotionScript::patrol(&stations, 1.0, 2.0, 0.0)
        }
        "open_road" => {
            let stations: Vec<_> = (0..4)
                .map(|i| (Vector3::new(10.0 * i as f64, 0.0, 1.8), yaw(0.0)))
                .collect();
            MotionScript::patrol(&stations, 1.0, 2.0, 0.0)
        }
        "forest" => MotionScript::patrol(
            &[
                (Vector3::new(-1.5, -1.5, 1.3), yaw(-45.0)),
                (Vector3::new(1.5, -1.5, 1.3), yaw(0.0)),
                (Vector3::new(1.5, 1.5, 1.3), yaw(45.0)),
                (Vector3::new(-1.5, 1.5, 1.3), yaw(135.0)),
            ],
            0.4,
            2.0,
            0.0,
        ),
        other => Err(Error::InvalidArgument(format!(
            "no canonical tour for scene {other:?}"
        ))),
    }
}
