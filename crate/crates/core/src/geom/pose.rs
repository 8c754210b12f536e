//! Timestamped SE(3) poses.
//!
//! Convention: quaternions are `(w, x, y, z)` with the Hamilton product,
//! and a pose is the passive world-from-body transform — applying a pose
//! to a point expressed in the body frame yields its world coordinates.

use nalgebra::{Matrix3, Quaternion, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// A timestamped rigid transform: rotation (unit quaternion) plus translation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose<T: Real> {
    /// Timestamp in seconds. Carried as metadata; the group operations
    /// below leave time bookkeeping to the caller.
    pub stamp: f64,
    pub rotation: UnitQuaternion<T>,
    pub translation: Vector3<T>,
}

impl<T: Real> Pose<T> {
    pub fn identity() -> Self {
        Pose {
            stamp: 0.0,
            rotation: UnitQuaternion::identity(),
            translation: Vector3::zeros(),
        }
    }

    /// Builds a pose, renormalizing the quaternion.
    pub fn new(stamp: f64, rotation: UnitQuaternion<T>, translation: Vector3<T>) -> Self {
        Pose {
            stamp,
            rotation: UnitQuaternion::new_normalize(rotation.into_inner()),
            translation,
        }
    }

    pub fn from_parts(rotation: UnitQuaternion<T>, translation: Vector3<T>) -> Self {
        Self::new(0.0, rotation, translation)
    }

    pub fn from_translation(x: T, y: T, z: T) -> Self {
        Self::from_parts(UnitQuaternion::identity(), Vector3::new(x, y, z))
    }

    /// Rotation of `angle` radians about `axis` (need not be normalized), zero translation.
    pub fn from_axis_angle(axis: Vector3<T>, angle: T) -> Self {
        let axis = nalgebra::Unit::new_normalize(axis);
        Self::from_parts(UnitQuaternion::from_axis_angle(&axis, angle), Vector3::zeros())
    }

    /// Builds from raw quaternion components in `(w, x, y, z)` order.
    pub fn from_wxyz(stamp: f64, w: T, x: T, y: T, z: T, translation: Vector3<T>) -> Self {
        Self::new(stamp, UnitQuaternion::new_normalize(Quaternion::new(w, x, y, z)), translation)
    }

    pub fn with_stamp(mut self, stamp: f64) -> Self {
        self.stamp = stamp;
        self
    }

    /// Composition `self ∘ other`: applies `other` first, then `self`.
    /// The result keeps the stamp of `other` (the moving-frame operand).
    pub fn compose(&self, other: &Pose<T>) -> Pose<T> {
        Pose::new(
            other.stamp,
            self.rotation * other.rotation,
            self.rotation * other.translation + self.translation,
        )
    }

    pub fn inverse(&self) -> Pose<T> {
        let rot_inv = self.rotation.inverse();
        Pose::new(self.stamp, rot_inv, -(rot_inv * self.translation))
    }

    /// `R·p + t`.
    pub fn transform_point(&self, p: &Vector3<T>) -> Vector3<T> {
        self.rotation * p + self.translation
    }

    /// Rotates a direction without translating it.
    pub fn rotate(&self, v: &Vector3<T>) -> Vector3<T> {
        self.rotation * v
    }

    pub fn rotation_matrix(&self) -> Matrix3<T> {
        self.rotation.to_rotation_matrix().into_inner()
    }

    /// Left-multiplicative increment used by the iterative aligners:
    /// `(Exp(omega), rho) ∘ self`, with `omega` a scaled rotation axis.
    pub fn left_increment(&self, rho: &Vector3<T>, omega: &Vector3<T>) -> Pose<T> {
        let delta = Pose::new(self.stamp, UnitQuaternion::from_scaled_axis(*omega), *rho);
        delta.compose(self)
    }

    /// Rotation angle of `self⁻¹ ∘ other`, in radians.
    pub fn rotation_angle_to(&self, other: &Pose<T>) -> T {
        self.rotation.angle_to(&other.rotation)
    }

    /// Euclidean distance between the two translations.
    pub fn translation_distance_to(&self, other: &Pose<T>) -> T {
        (self.translation - other.translation).norm()
    }
}

impl<T: Real> Default for Pose<T> {
    fn default() -> Self {
        Self::identity()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    type PoseD = Pose<f64>;

    fn random_pose(rng: &mut impl rand::Rng) -> PoseD {
        let axis = Vector3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0f64),
        );
        let angle = rng.random_range(-3.0..3.0);
        let t = Vector3::new(
            rng.random_range(-5.0..5.0),
            rng.random_range(-5.0..5.0),
            rng.random_range(-5.0..5.0),
        );
        PoseD::from_parts(
            UnitQuaternion::from_scaled_axis(axis.normalize() * angle),
            t,
        )
    }

    #[test]
    fn identity_compose_is_neutral() {
        let t = PoseD::from_wxyz(0.0, 0.9, 0.1, 0.2, 0.3, Vector3::new(1.0, -2.0, 3.0));
        let composed = PoseD::identity().compose(&t);
        assert_relative_eq!(composed.translation, t.translation, epsilon = 1e-12);
        assert!(composed.rotation_angle_to(&t) < 1e-12);
    }

    #[test]
    fn compose_with_inverse_is_identity() {
        let t = PoseD::from_wxyz(0.0, 0.4, -0.3, 0.5, 0.1, Vector3::new(0.3, 0.7, -1.1));
        let id = t.compose(&t.inverse());
        assert!(id.translation.norm() < 1e-9);
        assert!(id.rotation.angle() < 1e-9);
    }

    #[test]
    fn rz_quarter_turns_compose_to_half_turn() {
        let rz90 = PoseD::from_axis_angle(Vector3::z(), std::f64::consts::FRAC_PI_2);
        let rz180 = rz90.compose(&rz90);
        let expected = PoseD::from_axis_angle(Vector3::z(), std::f64::consts::PI);
        assert!(rz180.rotation_angle_to(&expected) < 1e-12);
        assert!(rz180.translation.norm() < 1e-12);
    }

    #[test]
    fn quaternion_stays_normalized() {
        // Drive many compositions and check the norm never drifts.
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut acc = PoseD::identity();
        for _ in 0..500 {
            acc = acc.compose(&random_pose(&mut rng));
            assert!((acc.rotation.into_inner().norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn compose_is_associative_on_random_triples() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let (a, b, c) = (
                random_pose(&mut rng),
                random_pose(&mut rng),
                random_pose(&mut rng),
            );
            let left = a.compose(&b).compose(&c);
            let right = a.compose(&b.compose(&c));
            assert!(left.translation_distance_to(&right) < 1e-9);
            assert!(left.rotation_angle_to(&right) < 1e-9);
        }
    }

    #[test]
    fn works_for_f32_too() {
        let t = Pose::<f32>::from_axis_angle(Vector3::z(), std::f32::consts::FRAC_PI_2);
        let p = t.transform_point(&Vector3::new(1.0, 0.0, 0.0));
        assert_relative_eq!(p, Vector3::new(0.0, 1.0, 0.0), epsilon = 1e-6);
    }
}
