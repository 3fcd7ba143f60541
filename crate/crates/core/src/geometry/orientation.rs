//! Roll/pitch state on the constrained manifold and the frame conventions
//! tying image geometry to the world.
//!
//! Conventions used throughout the toolkit:
//!
//! * Camera frame: x right, y down (image rows grow downward), z forward along
//!   the optical axis.
//! * Body frame: x forward (= camera z), y = camera x, z = camera y. At level
//!   attitude the body z axis coincides with gravity, the world +z axis.
//! * Positive roll turns the camera counterclockwise about the optical axis as
//!   seen from behind it, so the horizon appears in the image with slope
//!   `+tan(roll)`.
//! * Positive pitch raises the optical axis above the horizon, so the horizon
//!   center row moves down to `cy + fy * tan(pitch)`.

use super::vec::Vec3;
use crate::scalar::Real;

/// Roll/pitch pair in radians. The filter constrains both angles to a
/// configured range (default +-45 degrees, within reach of the conventions above).
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct OrientationRP<T> {
    pub roll: T,
    pub pitch: T,
}

impl<T: Real> OrientationRP<T> {
    pub fn new(roll: T, pitch: T) -> Self {
        Self { roll, pitch }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero())
    }

    /// Chart distance `sqrt(droll^2 + dpitch^2)`. Euclidean on the roll/pitch
    /// chart; no wraparound is needed within the +-45 degree range.
    pub fn angular_distance(&self, other: &Self) -> T {
        let dr = self.roll - other.roll;
        let dp = self.pitch - other.pitch;
        (dr * dr + dp * dp).sqrt()
    }

    /// Unit gravity direction expressed in the body frame for this attitude:
    /// `(-sin(pitch), -sin(roll) cos(pitch), cos(roll) cos(pitch))`.
    ///
    /// This single vector determines the flat-earth horizon: a body-frame ray
    /// `r` points above the horizon iff `r . gravity_in_body < 0`.
    pub fn gravity_in_body(&self) -> Vec3<T> {
        let (sr, cr) = (self.roll.sin(), self.roll.cos());
        let (sp, cp) = (self.pitch.sin(), self.pitch.cos());
        Vec3::new(-sp, -sr * cp, cr * cp)
    }

    /// Inverse of [`gravity_in_body`](Self::gravity_in_body): recover the
    /// attitude whose body-frame gravity direction is `g`.
    pub fn from_gravity_in_body(g: Vec3<T>) -> Self {
        let g = g.normalized().expect("gravity direction must be nonzero");
        let pitch = (-g.x).atan2((g.y * g.y + g.z * g.z).sqrt());
        let roll = (-g.y).atan2(g.z);
        Self::new(roll, pitch)
    }
}

/// Map camera-frame coordinates (x right, y down, z forward) to body-frame
/// coordinates (x forward, y right, z down).
pub fn camera_to_body<T: Real>(v: Vec3<T>) -> Vec3<T> {
    Vec3::new(v.z, v.x, v.y)
}

/// Inverse of [`camera_to_body`].
pub fn body_to_camera<T: Real>(v: Vec3<T>) -> Vec3<T> {
    Vec3::new(v.y, v.z, v.x)
}
