//! Closed-form rigid alignment of paired point sets (no scale).

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::geom::Pose;
use crate::scalar::Real;

/// Relative magnitude below which a singular value counts as zero.
const RANK_EPS: f64 = 1e-9;

/// Least-squares rigid transform `(R, t)` minimizing
/// `Σ ‖target_i − (R·source_i + t)‖²`, with `det(R) = +1` enforced.
///
/// Fails on fewer than three pairs or when the sources are collinear
/// (coincident counts), since the rotation is then not unique.
pub fn umeyama_alignment<T: Real>(
    source: &[Vector3<T>],
    target: &[Vector3<T>],
) -> Result<Pose<T>> {
    if source.len() != target.len() {
        return Err(Error::InvalidArgument(format!(
            "paired sequences differ in length: {} vs {}",
            source.len(),
            target.len()
        )));
    }
    if source.len() < 3 {
        return Err(Error::DegenerateAlignment(format!(
            "need at least 3 pairs, got {}",
            source.len()
        )));
    }

    let n = T::from_f64_c(source.len() as f64);
    let src_mean = source.iter().fold(Vector3::zeros(), |a, p| a + p) / n;
    let tgt_mean = target.iter().fold(Vector3::zeros(), |a, p| a + p) / n;

    let mut cross = Matrix3::<T>::zeros();
    let mut src_spread = Matrix3::<T>::zeros();
    for (s, t) in source.iter().zip(target) {
        let ds = s - src_mean;
        let dt = t - tgt_mean;
        cross += dt * ds.transpose();
        src_spread += ds * ds.transpose();
    }

    // Collinear (or coincident) sources leave a rotation about the line
    // unconstrained: the source scatter must have rank >= 2.
    let spread_svd = src_spread.svd(false, false);
    let s = &spread_svd.singular_values;
    if s[0] <= T::from_f64_c(f64::MIN_POSITIVE) || s[1] <= s[0] * T::from_f64_c(RANK_EPS) {
        return Err(Error::DegenerateAlignment(
            "source points are collinear or coincident".into(),
        ));
    }

    let svd = cross.svd(true, true);
    let u = svd.u.ok_or(Error::SingularSystem)?;
    let v_t = svd.v_t.ok_or(Error::SingularSystem)?;
    let mut d = Matrix3::identity();
    if (u * v_t).determinant() < T::zero() {
        d[(2, 2)] = -T::one();
    }
    let rotation_matrix = u * d * v_t;
    let rotation = nalgebra::UnitQuaternion::from_matrix(&rotation_matrix);
    let translation = tgt_mean - rotation * src_mean;
    Ok(Pose::from_parts(rotation, translation))
}
