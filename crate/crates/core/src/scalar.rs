//! Scalar abstraction shared by the numerical modules.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Floating-point type usable by the simulator (`f32` or `f64`).
///
/// Everything that must meet the published tolerances is exercised with
/// `f64`; `f32` works for the geometry and fitting code at coarse precision.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal; every finite `f64` is representable
    /// (possibly rounded) in the supported types.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 literal")
    }

    /// Lossy conversion used for error payloads and reports.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    /// Speed of light in this scalar type.
    #[inline]
    fn c() -> Self {
        Self::lit(SPEED_OF_LIGHT)
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + NumAssign
        + Sum
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Angular frequency (rad/s) of a vacuum wavelength (m).
#[inline]
pub fn angular_frequency<T: Real>(wavelength: T) -> T {
    T::TAU() * T::c() / wavelength
}

/// Vacuum wavelength (m) of an angular frequency (rad/s).
#[inline]
pub fn wavelength<T: Real>(angular_frequency: T) -> T {
    T::TAU() * T::c() / angular_frequency
}

/// Converts a delay expressed as `c·τ/2` (m) to the time delay τ (s).
#[inline]
pub fn delay_to_time<T: Real>(delay: T) -> T {
    delay * T::lit(2.0) / T::c()
}
