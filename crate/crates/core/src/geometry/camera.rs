//! Pinhole intrinsics, pixel unprojection, and ray-to-ground intersection.

use thiserror::Error;

use super::vec::Vec3;
use crate::scalar::Real;

/// Tolerance on `cos(theta)` below which a ray is treated as never reaching the ground.
pub const EPS_COS: f64 = 1e-9;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum CameraError {
    #[error("ray is parallel to the ground plane; no finite intersection")]
    RayParallelToGround,
}

/// Pinhole camera intrinsics in pixels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CameraIntrinsics<T> {
    pub fx: T,
    pub fy: T,
    pub cx: T,
    pub cy: T,
}

impl<T: Real> CameraIntrinsics<T> {
    pub fn new(fx: T, fy: T, cx: T, cy: T) -> Self {
        assert!(fx > T::zero() && fy > T::zero(), "focal lengths must be positive");
        Self { fx, fy, cx, cy }
    }
}

/// Viewing ray through a pixel, stored unnormalized with unit z after unprojection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ray3<T> {
    pub direction: Vec3<T>,
}

impl<T: Real> Ray3<T> {
    pub fn new(direction: Vec3<T>) -> Self {
        Self { direction }
    }
}

/// Back-project pixel `(u, v)` through the inverse intrinsics:
/// `K^-1 (u, v, 1)^T = ((u - cx)/fx, (v - cy)/fy, 1)`.
pub fn unproject<T: Real>(k: &CameraIntrinsics<T>, pixel: (T, T)) -> Ray3<T> {
    let (u, v) = pixel;
    Ray3::new(Vec3::new((u - k.cx) / k.fx, (v - k.cy) / k.fy, T::one()))
}

/// Intersect `ray` with the ground plane a perpendicular distance `height`
/// below the camera along `gravity`: the point is `l * ray_hat` with
/// `l = height / cos(theta)`, `cos(theta) = ray_hat . gravity_hat`.
///
/// The returned point's component along `gravity` equals `height` up to
/// rounding; rays with `cos(theta) <= EPS_COS` have no finite intersection.
pub fn ray_ground_point<T: Real>(
    ray: &Ray3<T>,
    gravity: &Ray3<T>,
    height: T,
) -> Result<Vec3<T>, CameraError> {
    let r = ray.direction.normalized().ok_or(CameraError::RayParallelToGround)?;
    let g = gravity.direction.normalized().ok_or(CameraError::RayParallelToGround)?;
    let cos_theta = r.dot(g);
    if cos_theta <= T::of(EPS_COS) {
        return Err(CameraError::RayParallelToGround);
    }
    let l = height / cos_theta;
    Ok(r.scale(l))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k100() -> CameraIntrinsics<f64> {
        CameraIntrinsics::new(100.0, 100.0, 50.0, 50.0)
    }

    #[test]
    fn principal_point_maps_to_optical_axis() {
        let r = unproject(&k100(), (50.0, 50.0));
        assert_eq!(r.direction, Vec3::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn unproject_matches_hand_inverse() {
        // (150 - 50) / 100 = 1
        let r = unproject(&k100(), (150.0, 50.0));
        assert_eq!(r.direction, Vec3::new(1.0, 0.0, 1.0));
        // fy = 200, cy = 60: (260 - 60) / 200 = 1
        let k = CameraIntrinsics::new(100.0, 200.0, 50.0, 60.0);
        let r = unproject(&k, (50.0, 260.0));
        assert_eq!(r.direction, Vec3::new(0.0, 1.0, 1.0));
    }

    #[test]
    fn unproject_is_linear_on_normalized_plane() {
        let k = CameraIntrinsics::<f64>::new(120.0, 80.0, 33.0, 41.0);
        let a = unproject(&k, (10.0, 90.0)).direction;
        let b = unproject(&k, (70.0, 20.0)).direction;
        // Superposition about the principal point: offsets add.
        let sum = unproject(&k, (10.0 + 70.0 - k.cx, 90.0 + 20.0 - k.cy)).direction;
        assert!((sum.x - (a.x + b.x)).abs() < 1e-12);
        assert!((sum.y - (a.y + b.y)).abs() < 1e-12);
        assert_eq!(sum.z, 1.0);
    }

    #[test]
    fn nadir_ray_hits_ground_at_height() {
        let p = ray_ground_point(
            &Ray3::new(Vec3::new(0.0, 0.0, 1.0)),
            &Ray3::new(Vec3::new(0.0, 0.0, 1.0)),
            100.0,
        )
        .unwrap();
        assert!((p - Vec3::new(0.0, 0.0, 100.0)).norm() < 1e-12);
    }

    #[test]
    fn oblique_ray_scales_by_slant_length() {
        // cos(theta) = 1/sqrt(2), l = 100 sqrt(2) ~ 141.42
        let p = ray_ground_point(
            &Ray3::new(Vec3::new(1.0, 0.0, 1.0)),
            &Ray3::new(Vec3::new(0.0, 0.0, 1.0)),
            100.0,
        )
        .unwrap();
        assert!((p - Vec3::new(100.0, 0.0, 100.0)).norm() < 1e-9);
        assert!((p.norm() - 100.0 * 2.0f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn grazing_ray_is_rejected() {
        let r = ray_ground_point(
            &Ray3::new(Vec3::new(1.0, 0.0, 0.0)),
            &Ray3::new(Vec3::new(0.0, 0.0, 1.0)),
            100.0,
        );
        assert_eq!(r.unwrap_err(), CameraError::RayParallelToGround);
    }

    #[test]
    fn gravity_component_equals_height() {
        let g = Vec3::<f64>::new(0.1, -0.3, 0.94).normalized().unwrap();
        for &(x, y) in &[(0.4, 0.2), (-0.3, 0.5), (0.0, 0.9)] {
            let p = ray_ground_point(&Ray3::new(Vec3::new(x, y, 1.0)), &Ray3::new(g), 250.0);
            if let Ok(p) = p {
                assert!((p.dot(g) - 250.0).abs() < 1e-9);
            }
        }
    }
}
