//! Scalar abstraction for the geometry and registration kernels.

use num_traits::{FromPrimitive, ToPrimitive};

/// Floating-point scalar the core math is generic over: `f32` or `f64`.
pub trait Real:
    nalgebra::RealField + FromPrimitive + ToPrimitive + Copy + Default
{
    /// Lossless-enough conversion from an `f64` constant.
    fn from_f64_c(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 constant")
    }

    /// Widen to `f64` (exact for both supported scalars' value ranges).
    fn to_f64_c(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl Real for f32 {}
impl Real for f64 {}
