//! Ground-plane tracking: sample ground pixels, back-project them onto the
//! assumed flat ground at barometric height, recover the plane normal from
//! cross products, and align it to the reference normal for roll/pitch.
//!
//! Back-projection needs the gravity direction in the current camera frame.
//! The caller injects it per frame as an attitude hint (from the fused
//! estimate, the IMU, or ground truth in closed-loop tests); the tracker holds
//! no attitude state of its own.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geometry::{
    body_to_camera, camera_to_body, euler_from_rotation, ray_ground_point, rodrigues_align,
    unproject, CameraIntrinsics, OrientationRP, Ray3, RotationError, Vec3,
};
use crate::mask::{BinaryMask, Cell};
use crate::observation::{Observation, ObservationSource};
use crate::scalar::Real;

/// Relative threshold declaring a triplet's cross product degenerate.
pub const COLLINEAR_REL_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum GroundPlaneError {
    #[error("too few ground pixels to reconstruct a plane")]
    InsufficientGroundRegion,
    #[error("sampled ground points are collinear; no plane normal")]
    CollinearPoints,
    #[error("camera below the minimum height for ground-plane tracking")]
    BelowMinHeight,
    #[error("normal alignment failed: {0}")]
    Alignment(#[from] RotationError),
}

/// Plane observation bookkeeping: the recovered normal (body frame), the
/// number of reconstructed points behind it, and the inputs it used.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlaneObservation<T> {
    pub normal: Vec3<T>,
    pub points_used: usize,
    pub height: T,
    pub timestamp: T,
}

#[derive(Clone, Copy, Debug)]
pub struct GroundPlaneConfig<T> {
    /// Tracking is only triggered above this height (meters).
    pub min_height: T,
    /// Constant variance attached to emitted observations (radians^2).
    pub variance: T,
    /// Target number of evenly sampled ground pixels.
    pub sample_count: usize,
    /// Number of random triplets averaged into the plane normal.
    pub triplet_count: usize,
    /// Minimum pairwise pixel distance between triplet members.
    pub min_pixel_separation: f64,
    /// Seed for the (per-frame re-seeded) triplet selection.
    pub seed: u64,
}

impl<T: Real> Default for GroundPlaneConfig<T> {
    fn default() -> Self {
        let sigma = T::radians_from_degrees(0.8);
        Self {
            min_height: T::of(300.0),
            variance: sigma * sigma,
            sample_count: 64,
            triplet_count: 32,
            min_pixel_separation: 10.0,
            seed: 0,
        }
    }
}

/// Evenly sample up to `n` ground pixels on a lattice over the ground
/// region's bounding box, keeping only cells classified as ground.
pub fn sample_ground_pixels(mask: &BinaryMask, n: usize) -> Result<Vec<(u32, u32)>, GroundPlaneError> {
    let mut bbox: Option<(u32, u32, u32, u32)> = None;
    for v in 0..mask.height() {
        for u in 0..mask.width() {
            if mask.get(u, v) == Cell::Ground {
                bbox = Some(match bbox {
                    None => (u, u, v, v),
                    Some((u0, u1, v0, v1)) => (u0.min(u), u1.max(u), v0.min(v), v1.max(v)),
                });
            }
        }
    }
    let (u0, u1, v0, v1) = bbox.ok_or(GroundPlaneError::InsufficientGroundRegion)?;

    let side = (n as f64).sqrt().ceil().max(1.0) as u32;
    let lattice = |lo: u32, hi: u32, i: u32| -> u32 {
        if side == 1 || hi == lo {
            (lo + hi) / 2
        } else {
            lo + ((f64::from(i) * f64::from(hi - lo)) / f64::from(side - 1)).round() as u32
        }
    };

    let mut pixels = Vec::new();
    for j in 0..side {
        for i in 0..side {
            let (u, v) = (lattice(u0, u1, i), lattice(v0, v1, j));
            if mask.get(u, v) == Cell::Ground && !pixels.contains(&(u, v)) {
                pixels.push((u, v));
            }
        }
    }
    if pixels.len() < 3 {
        return Err(GroundPlaneError::InsufficientGroundRegion);
    }
    Ok(pixels)
}

/// Back-project pixels onto the ground plane: unproject each pixel, scale the
/// unit ray by `height / cos(theta)` against `gravity_camera`, and drop rays
/// that cannot reach the ground. Points come back in the camera frame.
pub fn reconstruct_ground_points<T: Real>(
    pixels: &[(u32, u32)],
    k: &CameraIntrinsics<T>,
    gravity_camera: Vec3<T>,
    height: T,
) -> Result<Vec<Vec3<T>>, GroundPlaneError> {
    let gravity = Ray3::new(gravity_camera);
    let mut points = Vec::with_capacity(pixels.len());
    for &(u, v) in pixels {
        let ray = unproject(k, (T::of(f64::from(u)), T::of(f64::from(v))));
        if let Ok(p) = ray_ground_point(&ray, &gravity, height) {
            points.push(p);
        }
    }
    if points.len() < 3 {
        return Err(GroundPlaneError::InsufficientGroundRegion);
    }
    Ok(points)
}

fn triplet_cross<T: Real>(points: &[Vec3<T>], i: usize, j: usize, k: usize) -> Option<Vec3<T>> {
    let e1 = points[i] - points[j];
    let e2 = points[i] - points[k];
    let c = e1.cross(e2);
    let scale = e1.norm() * e2.norm();
    if c.norm() < T::of(COLLINEAR_REL_TOL) * scale {
        None
    } else {
        Some(c)
    }
}

fn normal_from_triplets<T: Real>(
    points: &[Vec3<T>],
    hemisphere: Vec3<T>,
    triplet_count: usize,
    rng: &mut impl Rng,
    accept: impl Fn(usize, usize, usize) -> bool,
) -> Result<Vec3<T>, GroundPlaneError> {
    let n = points.len();
    debug_assert!(n >= 3);
    let attempts = (triplet_count * 16).max(256);
    let mut sum = Vec3::zero();
    let mut valid = 0usize;
    for _ in 0..attempts {
        if valid >= triplet_count {
            break;
        }
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        let k = rng.random_range(0..n);
        if i == j || j == k || i == k || !accept(i, j, k) {
            continue;
        }
        if let Some(c) = triplet_cross(points, i, j, k) {
            let mut unit = c.normalized().expect("non-degenerate cross");
            if unit.dot(hemisphere) < T::zero() {
                unit = -unit;
            }
            sum = sum + unit;
            valid += 1;
        }
    }
    if valid == 0 {
        return Err(GroundPlaneError::CollinearPoints);
    }
    sum.normalized().ok_or(GroundPlaneError::CollinearPoints)
}

/// Robust plane normal: average of unit cross products over random
/// non-degenerate triplets, sign-aligned into the hemisphere of `hemisphere`.
pub fn plane_normal<T: Real>(
    points: &[Vec3<T>],
    hemisphere: Vec3<T>,
    triplet_count: usize,
    rng: &mut impl Rng,
) -> Result<Vec3<T>, GroundPlaneError> {
    if points.len() < 3 {
        return Err(GroundPlaneError::InsufficientGroundRegion);
    }
    normal_from_triplets(points, hemisphere, triplet_count, rng, |_, _, _| true)
}

/// Within-frame result of the normal recovery pipeline.
fn observe_plane<T: Real>(
    mask: &BinaryMask,
    k: &CameraIntrinsics<T>,
    config: &GroundPlaneConfig<T>,
    attitude_hint: OrientationRP<T>,
    height: T,
    timestamp: T,
) -> Result<PlaneObservation<T>, GroundPlaneError> {
    let gravity_camera = body_to_camera(attitude_hint.gravity_in_body());
    let pixels = sample_ground_pixels(mask, config.sample_count)?;
    let points = reconstruct_ground_points(&pixels, k, gravity_camera, height)?;

    // Re-seeded per frame: identical frames yield bit-identical normals.
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let min_sep = config.min_pixel_separation;
    let sep_ok = |a: (u32, u32), b: (u32, u32)| {
        let du = f64::from(a.0) - f64::from(b.0);
        let dv = f64::from(a.1) - f64::from(b.1);
        du * du + dv * dv >= min_sep * min_sep
    };
    let filtered = normal_from_triplets(
        &points,
        gravity_camera,
        config.triplet_count,
        &mut rng,
        |i, j, l| sep_ok(pixels[i], pixels[j]) && sep_ok(pixels[j], pixels[l]) && sep_ok(pixels[i], pixels[l]),
    );
    // Tiny ground regions may defeat the pixel-separation rule; retry without it.
    let normal_camera = match filtered {
        Ok(n) => n,
        Err(GroundPlaneError::CollinearPoints) => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            normal_from_triplets(&points, gravity_camera, config.triplet_count, &mut rng, |_, _, _| true)?
        }
        Err(e) => return Err(e),
    };

    Ok(PlaneObservation {
        normal: camera_to_body(normal_camera),
        points_used: points.len(),
        height,
        timestamp,
    })
}

/// Ground-plane tracker with an immutable body-frame reference normal.
#[derive(Clone, Debug)]
pub struct GroundTracker<T> {
    intrinsics: CameraIntrinsics<T>,
    config: GroundPlaneConfig<T>,
    reference_normal: Vec3<T>,
}

impl<T: Real> GroundTracker<T> {
    /// Tracker referenced to a level start: the ground normal is straight
    /// down the body z axis.
    pub fn new(intrinsics: CameraIntrinsics<T>, config: GroundPlaneConfig<T>) -> Self {
        Self::with_reference_normal(intrinsics, config, Vec3::new(T::zero(), T::zero(), T::one()))
    }

    pub fn with_reference_normal(
        intrinsics: CameraIntrinsics<T>,
        config: GroundPlaneConfig<T>,
        reference_normal: Vec3<T>,
    ) -> Self {
        Self { intrinsics, config, reference_normal }
    }

    pub fn reference_normal(&self) -> Vec3<T> {
        self.reference_normal
    }

    /// Recover the body-frame ground normal for one frame without comparing
    /// it to the reference (used to capture references).
    pub fn observe_normal(
        &self,
        mask: &BinaryMask,
        height: T,
        attitude_hint: OrientationRP<T>,
        timestamp: T,
    ) -> Result<PlaneObservation<T>, GroundPlaneError> {
        observe_plane(mask, &self.intrinsics, &self.config, attitude_hint, height, timestamp)
    }

    /// Full per-frame pipeline: recover the current normal, align it onto the
    /// reference normal, and read roll/pitch off the alignment rotation (the
    /// yaw component is discarded).
    ///
    /// The roll sign is negated on output: the minimal alignment rotation of
    /// the gravity normal expresses roll about the backward axis, opposite to
    /// the image-slope roll convention used by the rest of the toolkit.
    pub fn track(
        &self,
        mask: &BinaryMask,
        height: T,
        attitude_hint: OrientationRP<T>,
        timestamp: T,
    ) -> Result<Observation<T>, GroundPlaneError> {
        if height <= self.config.min_height {
            return Err(GroundPlaneError::BelowMinHeight);
        }
        let plane = self.observe_normal(mask, height, attitude_hint, timestamp)?;
        let rotation = rodrigues_align(plane.normal, self.reference_normal)?;
        let euler = euler_from_rotation(&rotation);
        Ok(Observation::new(
            ObservationSource::GroundPlane,
            OrientationRP::new(-euler.roll, euler.pitch),
            self.config.variance,
            timestamp,
        ))
    }
}
