//! skytilt: vision-aided roll/pitch estimation from binary sky/ground masks.
//!
//! The toolkit recovers camera attitude from two natural cues, the skyline and
//! the ground plane, fuses them with IMU data through an adaptive
//! multi-resolution particle filter on the roll/pitch manifold, and ships a
//! synthetic scene simulator plus evaluation metrics for closed-loop testing.
//!
//! All numeric code is generic over the scalar type via [`scalar::Real`]
//! (`f32` or `f64`); the crate root exports `f64` aliases for the common types.
//!
//! ```
//! use skytilt::geometry::OrientationRP;
//! use skytilt::sim::render_mask;
//! use skytilt::skyline::{SkylineConfig, SkylineTracker};
//!
//! let k = skytilt::IntrinsicsF64::new(500.0, 500.0, 320.0, 240.0);
//! let mut tracker = SkylineTracker::new(k, SkylineConfig::default());
//!
//! // The first frame becomes the reference; later frames yield roll/pitch
//! // relative to it.
//! let level = render_mask(OrientationRP::zero(), &k, (640, 480));
//! tracker.track(&level, 0.0).unwrap();
//! let rolled = render_mask(OrientationRP::new(0.1, 0.0), &k, (640, 480));
//! let obs = tracker.track(&rolled, 0.05).unwrap();
//! assert!((obs.value.roll - 0.1).abs() < 0.01);
//! ```

pub mod eval;
pub mod filter;
pub mod geometry;
pub mod groundplane;
pub mod io;
pub mod mask;
pub mod observation;
pub mod scalar;
pub mod sim;
pub mod skyline;

pub use mask::{BinaryMask, Cell};
pub use observation::{Observation, ObservationSource};
pub use scalar::Real;

/// `f64` aliases for the main domain types.
pub type OrientationF64 = geometry::OrientationRP<f64>;
pub type IntrinsicsF64 = geometry::CameraIntrinsics<f64>;
pub type ObservationF64 = observation::Observation<f64>;
pub type SkylineTrackerF64 = skyline::SkylineTracker<f64>;
pub type GroundTrackerF64 = groundplane::GroundTracker<f64>;
pub type ManifoldFilterF64 = filter::ManifoldFilter<f64>;
pub type TrajectoryF64 = sim::Trajectory<f64>;
