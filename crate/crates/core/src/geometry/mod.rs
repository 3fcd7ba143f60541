//! Rotation representations, camera geometry, and the roll/pitch state type
//! shared by the trackers, the filter, and the simulator.

mod camera;
mod orientation;
mod rotation;
mod vec;

pub use camera::{ray_ground_point, unproject, CameraError, CameraIntrinsics, Ray3, EPS_COS};
pub use orientation::{body_to_camera, camera_to_body, OrientationRP};
pub use rotation::{
    compose_euler, euler_from_rotation, rodrigues_align, EulerAngles, RotationError,
    RotationMatrix, UnitQuaternion, EPS_ANTIPARALLEL, EPS_GIMBAL,
};
pub use vec::{Mat3, Vec3};
