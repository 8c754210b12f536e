//! Sensor models: spinning multi-channel lidars and solid-state lidars
//! with a non-repetitive rosette pattern.

use nalgebra::Vector3;
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{PointCloud, Pose};
use crate::sim::Scene;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SensorKind {
    Spinning,
    SolidState,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorSpec {
    pub name: String,
    pub kind: SensorKind,
    /// Laser channels (spinning only).
    #[serde(default)]
    pub channels: usize,
    pub fov_h_deg: f64,
    pub fov_v_deg: f64,
    /// Horizontal angular resolution in degrees (spinning only).
    #[serde(default)]
    pub res_h_deg: Option<f64>,
    /// Vertical angular resolution in degrees (informational).
    #[serde(default)]
    pub res_v_deg: Option<f64>,
    /// Ray budget per second (drives solid-state frames).
    pub points_per_second: usize,
    pub max_range: f64,
    pub range_noise_sigma: f64,
    pub rate_hz: f64,
}

impl SensorSpec {
    pub fn vlp16() -> Self {
        SensorSpec {
            name: "vlp16".into(),
            kind: SensorKind::Spinning,
            channels: 16,
            fov_h_deg: 360.0,
            fov_v_deg: 30.0,
            res_h_deg: Some(0.4),
            res_v_deg: Some(2.0),
            points_per_second: 300_000,
            max_range: 100.0,
            range_noise_sigma: 0.02,
            rate_hz: 10.0,
        }
    }

    pub fn os1_64() -> Self {
        SensorSpec {
            name: "os1_64".into(),
            kind: SensorKind::Spinning,
            channels: 64,
            fov_h_deg: 360.0,
            fov_v_deg: 45.0,
            res_h_deg: Some(0.18),
            res_v_deg: Some(0.7),
            points_per_second: 1_310_720,
            max_range: 120.0,
            range_noise_sigma: 0.02,
            rate_hz: 10.0,
        }
    }

    pub fn os0_128() -> Self {
        SensorSpec {
            name: "os0_128".into(),
            kind: SensorKind::Spinning,
            channels: 128,
            fov_h_deg: 360.0,
            fov_v_deg: 90.0,
            res_h_deg: Some(0.18),
            res_v_deg: Some(0.7),
            points_per_second: 2_621_440,
            max_range: 50.0,
            range_noise_sigma: 0.02,
            rate_hz: 10.0,
        }
    }

    pub fn horizon() -> Self {
        SensorSpec {
            name: "horizon".into(),
            kind: SensorKind::SolidState,
            channels: 0,
            fov_h_deg: 81.7,
            fov_v_deg: 25.1,
            res_h_deg: None,
            res_v_deg: None,
            points_per_second: 240_000,
            max_range: 260.0,
            range_noise_sigma: 0.02,
            rate_hz: 10.0,
        }
    }

    pub fn avia() -> Self {
        SensorSpec {
            name: "avia".into(),
            kind: SensorKind::SolidState,
            channels: 0,
            fov_h_deg: 70.4,
            fov_v_deg: 77.2,
            res_h_deg: None,
            res_v_deg: None,
            points_per_second: 240_000,
            max_range: 450.0,
            range_noise_sigma: 0.02,
            rate_hz: 10.0,
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "vlp16" => Ok(Self::vlp16()),
            "os1_64" => Ok(Self::os1_64()),
            "os0_128" => Ok(Self::os0_128()),
            "horizon" => Ok(Self::horizon()),
            "avia" => Ok(Self::avia()),
            other => Err(Error::InvalidArgument(format!(
                "unknown sensor preset {other:?}; available: vlp16, os1_64, os0_128, horizon, avia"
            ))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let base_ok = self.fov_h_deg > 0.0
            && self.fov_h_deg <= 360.0
            && self.fov_v_deg > 0.0
            && self.fov_v_deg < 180.0
            && self.points_per_second > 0
            && self.max_range > 0.0
            && self.range_noise_sigma >= 0.0
            && self.rate_hz > 0.0;
        if !base_ok {
            return Err(Error::InvalidArgument(format!(
                "sensor spec {:?} out of range",
                self.name
            )));
        }
        if self.kind == SensorKind::Spinning && (self.channels == 0 || self.res_h_deg.is_none()) {
            return Err(Error::InvalidArgument(format!(
                "spinning sensor {:?} needs channels and res_h_deg",
                self.name
            )));
        }
        Ok(())
    }

    /// Rays emitted per frame.
    pub fn rays_per_frame(&self) -> usize {
        match self.kind {
            SensorKind::Spinning => {
                let az = (self.fov_h_deg / self.res_h_deg.unwrap_or(1.0)).round() as usize;
                self.channels * az
            }
            SensorKind::SolidState => {
                (self.points_per_second as f64 / self.rate_hz).round() as usize
            }
        }
    }
}

fn direction(az_rad: f64, el_rad: f64) -> Vector3<f64> {
    Vector3::new(
        el_rad.cos() * az_rad.cos(),
        el_rad.cos() * az_rad.sin(),
        el_rad.sin(),
    )
}

/// Casts one ray and appends the (noisy) hit in the sensor frame.
fn cast(
    scene: &Scene,
    pose: &Pose<f64>,
    dir_sensor: &Vector3<f64>,
    spec: &SensorSpec,
    noise: Option<&Normal<f64>>,
    rng: &mut rand_chacha::ChaCha8Rng,
    out: &mut Vec<Vector3<f64>>,
) {
    let dir_world = pose.rotate(dir_sensor);
    if let Some(range) = scene.raycast(&pose.translation, &dir_world, spec.max_range) {
        let range = match noise {
            Some(n) => range + n.sample(rng),
            None => range,
        };
        out.push(dir_sensor * range);
    }
}

/// One spinning-lidar sweep from a stationary pose: a channels-by-azimuth
/// grid of rays, Gaussian range noise, misses omitted. Points are in the
/// sensor frame. Output is a pure function of `(scene, pose, spec, seed)`.
pub fn simulate_spinning_scan(
    scene: &Scene,
    pose: &Pose<f64>,
    spec: &SensorSpec,
    seed: u64,
) -> Result<PointCloud<f64>> {
    spec.validate()?;
    if spec.kind != SensorKind::Spinning {
        return Err(Error::InvalidArgument(format!(
            "{:?} is not a spinning sensor",
            spec.name
        )));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let noise = (spec.range_noise_sigma > 0.0)
        .then(|| Normal::new(0.0, spec.range_noise_sigma).expect("finite sigma"));

    let res_h = spec.res_h_deg.expect("validated above");
    let n_az = (spec.fov_h_deg / res_h).round() as usize;
    let mut points = Vec::with_capacity(spec.rays_per_frame());
    for az_step in 0..n_az {
        let az = (-spec.fov_h_deg / 2.0 + az_step as f64 * res_h).to_radians();
        for ch in 0..spec.channels {
            let el = if spec.channels == 1 {
                0.0
            } else {
                (-spec.fov_v_deg / 2.0
                    + ch as f64 * spec.fov_v_deg / (spec.channels - 1) as f64)
                    .to_radians()
            };
            cast(scene, pose, &direction(az, el), spec, noise.as_ref(), &mut rng, &mut points);
        }
    }
    Ok(PointCloud::from_positions(points).with_frame_id(spec.name.clone()))
}

/// Golden ratio, the azimuth/elevation frequency ratio of the rosette.
const PHI: f64 = 1.618033988749895;
/// Azimuth sweep frequency in Hz.
const ROSETTE_F1: f64 = 91.0;

/// One solid-state frame: `points_per_second / rate` rays along a
/// two-frequency rosette whose phase advances with the absolute
/// `frame_time`, so consecutive frames sample fresh directions and
/// coverage grows with integration time.
pub fn simulate_solid_state_scan(
    scene: &Scene,
    pose: &Pose<f64>,
    spec: &SensorSpec,
    frame_time: f64,
    seed: u64,
) -> Result<PointCloud<f64>> {
    spec.validate()?;
    if spec.kind != SensorKind::SolidState {
        return Err(Error::InvalidArgument(format!(
            "{:?} is not a solid-state sensor",
            spec.name
        )));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let noise = (spec.range_noise_sigma > 0.0)
        .then(|| Normal::new(0.0, spec.range_noise_sigma).expect("finite sigma"));

    let n = spec.rays_per_frame();
    let pps = spec.points_per_second as f64;
    let base_sample = (frame_time * pps).round() as u64;
    let (half_h, half_v) = (spec.fov_h_deg / 2.0, spec.fov_v_deg / 2.0);
    let f2 = ROSETTE_F1 * PHI;

    let mut points = Vec::with_capacity(n);
    for s in 0..n as u64 {
        let tau = (base_sample + s) as f64 / pps;
        let az = (half_h * (std::f64::consts::TAU * ROSETTE_F1 * tau).sin()).to_radians();
        let el = (half_v * (std::f64::consts::TAU * f2 * tau).sin()).to_radians();
        cast(scene, pose, &direction(az, el), spec, noise.as_ref(), &mut rng, &mut points);
    }
    Ok(PointCloud::from_positions(points).with_frame_id(spec.name.clone()))
}
