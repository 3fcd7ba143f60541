//! Rotation representations: matrices, unit quaternions, Euler angles, and
//! the closed-form alignment of one direction onto another.

use thiserror::Error;

use super::vec::{Mat3, Vec3};
use crate::scalar::Real;

/// Tolerance below which `1 + s` in the alignment formula is treated as singular.
pub const EPS_ANTIPARALLEL: f64 = 1e-8;
/// Tolerance on `|r31|` past which Euler extraction is flagged as gimbal locked.
pub const EPS_GIMBAL: f64 = 1e-9;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum RotationError {
    /// The two directions point (near-)opposite ways; the `1/(1+s)` term blows up.
    #[error("input directions are antiparallel; alignment rotation is singular")]
    AntiparallelVectors,
    /// A direction with zero length carries no alignment information.
    #[error("input direction has zero length")]
    ZeroLengthVector,
}

/// Proper rotation matrix (orthonormal, determinant +1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotationMatrix<T> {
    mat: Mat3<T>,
}

impl<T: Real> RotationMatrix<T> {
    /// Wrap a matrix that is already known to be a proper rotation.
    pub fn from_mat_unchecked(mat: Mat3<T>) -> Self {
        Self { mat }
    }

    pub fn identity() -> Self {
        Self { mat: Mat3::identity() }
    }

    pub fn mat(&self) -> &Mat3<T> {
        &self.mat
    }

    pub fn apply(&self, v: Vec3<T>) -> Vec3<T> {
        self.mat * v
    }

    pub fn transpose(&self) -> Self {
        Self { mat: self.mat.transpose() }
    }

    pub fn compose(&self, rhs: &Self) -> Self {
        Self { mat: self.mat * rhs.mat }
    }

    /// Deviation from orthonormality: `||R^T R - I||_F`.
    pub fn orthonormality_error(&self) -> T {
        (self.mat.transpose() * self.mat - Mat3::identity()).frobenius_norm()
    }

    pub fn determinant(&self) -> T {
        self.mat.determinant()
    }

    /// Elementary rotation about the x axis.
    pub fn about_x(angle: T) -> Self {
        let (s, c) = (angle.sin(), angle.cos());
        let (o, z) = (T::one(), T::zero());
        Self { mat: Mat3::from_rows([o, z, z], [z, c, -s], [z, s, c]) }
    }

    /// Elementary rotation about the y axis.
    pub fn about_y(angle: T) -> Self {
        let (s, c) = (angle.sin(), angle.cos());
        let (o, z) = (T::one(), T::zero());
        Self { mat: Mat3::from_rows([c, z, s], [z, o, z], [-s, z, c]) }
    }

    /// Elementary rotation about the z axis.
    pub fn about_z(angle: T) -> Self {
        let (s, c) = (angle.sin(), angle.cos());
        let (o, z) = (T::one(), T::zero());
        Self { mat: Mat3::from_rows([c, -s, z], [s, c, z], [z, z, o]) }
    }
}

/// Euler decomposition of a rotation, intrinsic Z-Y-X (yaw, then pitch, then roll).
///
/// `gimbal_lock` marks the degenerate `|pitch| = pi/2` case, where yaw is fixed
/// to zero and the remaining freedom is folded into roll.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EulerAngles<T> {
    pub roll: T,
    pub pitch: T,
    pub yaw: T,
    pub gimbal_lock: bool,
}

/// `Rz(yaw) * Ry(pitch) * Rx(roll)` with right-handed axes.
pub fn compose_euler<T: Real>(roll: T, pitch: T, yaw: T) -> RotationMatrix<T> {
    RotationMatrix::about_z(yaw)
        .compose(&RotationMatrix::about_y(pitch))
        .compose(&RotationMatrix::about_x(roll))
}

/// Extract Z-Y-X Euler angles:
/// `roll = atan2(r32, r33)`, `pitch = atan2(-r31, sqrt(r32^2 + r33^2))`,
/// `yaw = atan2(r21, r11)`.
///
/// Near `|r31| = 1` both `(r32, r33)` and `(r21, r11)` collapse; the result is
/// flagged and returned with yaw fixed to zero.
pub fn euler_from_rotation<T: Real>(rot: &RotationMatrix<T>) -> EulerAngles<T> {
    let m = &rot.mat().m;
    let (r11, r21) = (m[0][0], m[1][0]);
    let (r31, r32, r33) = (m[2][0], m[2][1], m[2][2]);
    let (r12, r13) = (m[0][1], m[0][2]);

    let limit = T::one() - T::of(EPS_GIMBAL);
    if r31 <= -limit {
        // pitch = +pi/2; remaining freedom folded into roll, yaw pinned to 0.
        EulerAngles {
            roll: r12.atan2(r13),
            pitch: T::FRAC_PI_2(),
            yaw: T::zero(),
            gimbal_lock: true,
        }
    } else if r31 >= limit {
        EulerAngles {
            roll: (-r12).atan2(-r13),
            pitch: -T::FRAC_PI_2(),
            yaw: T::zero(),
            gimbal_lock: true,
        }
    } else {
        EulerAngles {
            roll: r32.atan2(r33),
            pitch: (-r31).atan2((r32 * r32 + r33 * r33).sqrt()),
            yaw: r21.atan2(r11),
            gimbal_lock: false,
        }
    }
}

/// Rotation taking direction `m` onto direction `n` (Rodrigues form):
/// `R = I + [k]x + [k]x^2 / (1 + s)` with `k = m_hat x n_hat`, `s = m_hat . n_hat`.
///
/// For `m == n` the cross product vanishes exactly and the identity is returned
/// bit-exactly. Antiparallel inputs are rejected.
pub fn rodrigues_align<T: Real>(m: Vec3<T>, n: Vec3<T>) -> Result<RotationMatrix<T>, RotationError> {
    let m_hat = m.normalized().ok_or(RotationError::ZeroLengthVector)?;
    let n_hat = n.normalized().ok_or(RotationError::ZeroLengthVector)?;
    let s = m_hat.dot(n_hat);
    if s <= T::of(-1.0 + EPS_ANTIPARALLEL) {
        return Err(RotationError::AntiparallelVectors);
    }
    let k = m_hat.cross(n_hat);
    let kx = Mat3::skew(k);
    let mat = Mat3::identity() + kx + (kx * kx) * (T::one() / (T::one() + s));
    Ok(RotationMatrix::from_mat_unchecked(mat))
}

/// Unit quaternion, scalar-first. Canonicalized to `w >= 0` on construction.
///
/// Serves as an independent rotation representation for cross-checking the
/// matrix routes in tests.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitQuaternion<T> {
    pub w: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> UnitQuaternion<T> {
    pub fn identity() -> Self {
        Self { w: T::one(), x: T::zero(), y: T::zero(), z: T::zero() }
    }

    /// Normalize and canonicalize (`w >= 0`) raw components.
    pub fn new_normalize(w: T, x: T, y: T, z: T) -> Self {
        let n = (w * w + x * x + y * y + z * z).sqrt();
        let sign = if w < T::zero() { -T::one() } else { T::one() };
        let s = sign / n;
        Self { w: w * s, x: x * s, y: y * s, z: z * s }
    }

    /// Quaternion for a rotation of `angle` about the (not necessarily unit) `axis`.
    pub fn from_axis_angle(axis: Vec3<T>, angle: T) -> Self {
        let axis = axis.normalized().expect("rotation axis must be nonzero");
        let half = angle * T::of(0.5);
        let s = half.sin();
        Self::new_normalize(half.cos(), axis.x * s, axis.y * s, axis.z * s)
    }

    pub fn norm(&self) -> T {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn to_rotation_matrix(&self) -> RotationMatrix<T> {
        let (w, x, y, z) = (self.w, self.x, self.y, self.z);
        let two = T::of(2.0);
        let o = T::one();
        let mat = Mat3::from_rows(
            [
                o - two * (y * y + z * z),
                two * (x * y - w * z),
                two * (x * z + w * y),
            ],
            [
                two * (x * y + w * z),
                o - two * (x * x + z * z),
                two * (y * z - w * x),
            ],
            [
                two * (x * z - w * y),
                two * (y * z + w * x),
                o - two * (x * x + y * y),
            ],
        );
        RotationMatrix::from_mat_unchecked(mat)
    }
}
