//! Scalar abstraction shared by every numerical kernel in the crate.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point scalar (`f32` or `f64`).
///
/// Tolerances that depend on the working precision live here so that the
/// kernels can stay generic.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Default tolerance for group and algebra membership checks.
    const MEMBERSHIP_TOL: f64;

    /// Convert an `f64` literal into the working precision.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn membership_tol() -> Self {
        Self::lit(Self::MEMBERSHIP_TOL)
    }
}

impl Real for f64 {
    const MEMBERSHIP_TOL: f64 = 1e-10;
}

impl Real for f32 {
    const MEMBERSHIP_TOL: f64 = 1e-4;
}
