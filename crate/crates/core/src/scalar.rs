//! Generic scalar abstraction over the floating-point types the toolkit runs on.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar usable throughout the crate: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
    /// Convert an `f64` literal or configuration value into this scalar type.
    fn of(value: f64) -> Self {
        Self::from_f64(value).expect("literal must be representable")
    }

    /// Lossy conversion to `f64`, for reporting and file output.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar must convert to f64")
    }

    /// Degrees to radians.
    fn radians_from_degrees(deg: f64) -> Self {
        Self::of(deg.to_radians())
    }
}

impl Real for f32 {}
impl Real for f64 {}
