//! Tagged orientation measurements exchanged between trackers and the filter.

use crate::geometry::OrientationRP;
use crate::scalar::Real;

/// Which pipeline produced an observation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObservationSource {
    Imu,
    Skyline,
    GroundPlane,
}

/// Orientation measurement with an isotropic per-axis variance and timestamp.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Observation<T> {
    pub source: ObservationSource,
    pub value: OrientationRP<T>,
    /// Per-axis variance in radians^2 (same for roll and pitch).
    pub variance: T,
    pub timestamp: T,
}

impl<T: Real> Observation<T> {
    pub fn new(source: ObservationSource, value: OrientationRP<T>, variance: T, timestamp: T) -> Self {
        debug_assert!(variance >= T::zero(), "variance must be nonnegative");
        Self { source, value, variance, timestamp }
    }
}
