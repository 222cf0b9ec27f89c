//! SE(3) pose algebra.
//!
//! Rotations are stored as 3×3 matrices; quaternions are an interchange form
//! in TUM order `(qx, qy, qz, qw)`, vector part first and scalar last. Many
//! libraries (nalgebra's constructor included) take the scalar first, so the
//! field names here are spelled out.

use core::ops::Mul;

use nalgebra::{Matrix3, Matrix4, Vector3};

use crate::error::{Error, Result};

/// Inputs with a norm below this are rejected instead of renormalized.
pub const MIN_QUATERNION_NORM: f64 = 1e-6;

/// Unit quaternion in TUM component order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quaternion {
    qx: f64,
    qy: f64,
    qz: f64,
    qw: f64,
}

impl Quaternion {
    pub const IDENTITY: Quaternion = Quaternion {
        qx: 0.0,
        qy: 0.0,
        qz: 0.0,
        qw: 1.0,
    };

    /// Builds a unit quaternion, normalizing the input.
    pub fn new(qx: f64, qy: f64, qz: f64, qw: f64) -> Result<Self> {
        if !(qx.is_finite() && qy.is_finite() && qz.is_finite() && qw.is_finite()) {
            return Err(Error::NonFinite { what: "quaternion" });
        }
        let norm = libm::sqrt(qx * qx + qy * qy + qz * qz + qw * qw);
        if norm < MIN_QUATERNION_NORM {
            return Err(Error::DegenerateQuaternion { norm });
        }
        Ok(Self {
            qx: qx / norm,
            qy: qy / norm,
            qz: qz / norm,
            qw: qw / norm,
        })
    }

    /// Rotation of `angle` radians about `axis` (need not be normalized).
    pub fn from_axis_angle(axis: &Vector3<f64>, angle: f64) -> Result<Self> {
        let n = axis.norm();
        if !(n.is_finite() && angle.is_finite()) {
            return Err(Error::NonFinite { what: "axis-angle" });
        }
        if n < MIN_QUATERNION_NORM {
            return Err(Error::DegenerateGeometry("rotation axis has zero length"));
        }
        let (s, c) = (libm::sin(angle / 2.0), libm::cos(angle / 2.0));
        let k = s / n;
        Self::new(axis.x * k, axis.y * k, axis.z * k, c)
    }

    pub fn qx(&self) -> f64 {
        self.qx
    }

    pub fn qy(&self) -> f64 {
        self.qy
    }

    pub fn qz(&self) -> f64 {
        self.qz
    }

    pub fn qw(&self) -> f64 {
        self.qw
    }

    /// Components as `[qx, qy, qz, qw]`.
    pub fn to_array(&self) -> [f64; 4] {
        [self.qx, self.qy, self.qz, self.qw]
    }

    /// Same rotation with `qw >= 0`.
    pub fn canonical(&self) -> Self {
        if self.qw < 0.0 {
            self.negated()
        } else {
            *self
        }
    }

    pub fn negated(&self) -> Self {
        Self {
            qx: -self.qx,
            qy: -self.qy,
            qz: -self.qz,
            qw: -self.qw,
        }
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.qx * other.qx + self.qy * other.qy + self.qz * other.qz + self.qw * other.qw
    }

    pub fn to_rotation_matrix(&self) -> Matrix3<f64> {
        let Self { qx: x, qy: y, qz: z, qw: w } = *self;
        let (xx, yy, zz) = (x * x, y * y, z * z);
        let (xy, xz, yz) = (x * y, x * z, y * z);
        let (wx, wy, wz) = (w * x, w * y, w * z);
        Matrix3::new(
            1.0 - 2.0 * (yy + zz),
            2.0 * (xy - wz),
            2.0 * (xz + wy),
            2.0 * (xy + wz),
            1.0 - 2.0 * (xx + zz),
            2.0 * (yz - wx),
            2.0 * (xz - wy),
            2.0 * (yz + wx),
            1.0 - 2.0 * (xx + yy),
        )
    }

    /// Shepperd's method: pivot on the largest of the four squared components.
    pub fn from_rotation_matrix(m: &Matrix3<f64>) -> Result<Self> {
        let trace = m[(0, 0)] + m[(1, 1)] + m[(2, 2)];
        let (qx, qy, qz, qw) = if trace > m[(0, 0)].max(m[(1, 1)]).max(m[(2, 2)]) {
            let s = 2.0 * libm::sqrt(1.0 + trace);
            (
                (m[(2, 1)] - m[(1, 2)]) / s,
                (m[(0, 2)] - m[(2, 0)]) / s,
                (m[(1, 0)] - m[(0, 1)]) / s,
                0.25 * s,
            )
        } else if m[(0, 0)] >= m[(1, 1)] && m[(0, 0)] >= m[(2, 2)] {
            let s = 2.0 * libm::sqrt(1.0 + m[(0, 0)] - m[(1, 1)] - m[(2, 2)]);
            (
                0.25 * s,
                (m[(0, 1)] + m[(1, 0)]) / s,
                (m[(0, 2)] + m[(2, 0)]) / s,
                (m[(2, 1)] - m[(1, 2)]) / s,
            )
        } else if m[(1, 1)] >= m[(2, 2)] {
            let s = 2.0 * libm::sqrt(1.0 + m[(1, 1)] - m[(0, 0)] - m[(2, 2)]);
            (
                (m[(0, 1)] + m[(1, 0)]) / s,
                0.25 * s,
                (m[(1, 2)] + m[(2, 1)]) / s,
                (m[(0, 2)] - m[(2, 0)]) / s,
            )
        } else {
            let s = 2.0 * libm::sqrt(1.0 + m[(2, 2)] - m[(0, 0)] - m[(1, 1)]);
            (
                (m[(0, 2)] + m[(2, 0)]) / s,
                (m[(1, 2)] + m[(2, 1)]) / s,
                0.25 * s,
                (m[(1, 0)] - m[(0, 1)]) / s,
            )
        };
        Self::new(qx, qy, qz, qw)
    }

    /// Spherical interpolation along the shorter arc; `u` in `[0, 1]`.
    pub fn slerp(&self, other: &Self, u: f64) -> Self {
        let mut target = *other;
        let mut cos_theta = self.dot(other);
        if cos_theta < 0.0 {
            target = target.negated();
            cos_theta = -cos_theta;
        }
        let (wa, wb) = if cos_theta > 1.0 - 1e-12 {
            (1.0 - u, u)
        } else {
            let theta = libm::acos(cos_theta.min(1.0));
            let sin_theta = libm::sin(theta);
            (
                libm::sin((1.0 - u) * theta) / sin_theta,
                libm::sin(u * theta) / sin_theta,
            )
        };
        let blend = |a: f64, b: f64| wa * a + wb * b;
        let q = [
            blend(self.qx, target.qx),
            blend(self.qy, target.qy),
            blend(self.qz, target.qz),
            blend(self.qw, target.qw),
        ];
        // Weights keep the result on the unit sphere up to rounding.
        Self::new(q[0], q[1], q[2], q[3]).unwrap_or(*self)
    }
}

/// Rotation matrix of a unit quaternion.
pub fn quat_to_rotation(q: &Quaternion) -> Matrix3<f64> {
    q.to_rotation_matrix()
}

/// Element of SE(3): `x ↦ rotation · x + translation`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform {
    rotation: Matrix3<f64>,
    translation: Vector3<f64>,
}

impl Default for RigidTransform {
    fn default() -> Self {
        Self::identity()
    }
}

impl RigidTransform {
    /// Tolerance for accepting a caller-supplied rotation matrix.
    pub const ORTHONORMAL_TOLERANCE: f64 = 1e-9;

    pub fn identity() -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn from_translation(translation: Vector3<f64>) -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation,
        }
    }

    pub fn from_quaternion(rotation: &Quaternion, translation: Vector3<f64>) -> Self {
        Self {
            rotation: rotation.to_rotation_matrix(),
            translation,
        }
    }

    /// Checks that `rotation` is orthonormal with determinant +1.
    pub fn from_parts(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Result<Self> {
        if rotation.iter().chain(translation.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "rigid transform" });
        }
        let gram = rotation.transpose() * rotation - Matrix3::identity();
        if gram.amax() > Self::ORTHONORMAL_TOLERANCE
            || (rotation.determinant() - 1.0).abs() > Self::ORTHONORMAL_TOLERANCE
        {
            return Err(Error::DegenerateGeometry("rotation is not a proper orthonormal matrix"));
        }
        Ok(Self {
            rotation,
            translation,
        })
    }

    pub(crate) fn from_parts_unchecked(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Self {
        Self {
            rotation,
            translation,
        }
    }

    pub fn rotation(&self) -> &Matrix3<f64> {
        &self.rotation
    }

    pub fn translation(&self) -> &Vector3<f64> {
        &self.translation
    }

    pub fn quaternion(&self) -> Quaternion {
        Quaternion::from_rotation_matrix(&self.rotation).unwrap_or(Quaternion::IDENTITY)
    }

    /// Homogeneous-matrix product `self · other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    /// `(Rᵀ, −Rᵀ t)`.
    pub fn inverse(&self) -> Self {
        let rt = self.rotation.transpose();
        Self {
            rotation: rt,
            translation: -(rt * self.translation),
        }
    }

    /// Motion from `self` to `other`: `self⁻¹ · other`.
    pub fn relative(&self, other: &Self) -> Self {
        self.inverse().compose(other)
    }

    pub fn transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    /// Euclidean norm of the translation, in meters.
    pub fn translation_norm(&self) -> f64 {
        self.translation.norm()
    }

    /// Rotation angle in `[0, π]`.
    ///
    /// `atan2(sin θ, cos θ)` with the cosine from the trace and the sine from
    /// the antisymmetric part. Plain `acos` of the trace cannot resolve angles
    /// below ~1e-8 rad.
    pub fn rotation_angle(&self) -> f64 {
        let r = &self.rotation;
        let cos = (r.trace() - 1.0) / 2.0;
        let axis = Vector3::new(r[(2, 1)] - r[(1, 2)], r[(0, 2)] - r[(2, 0)], r[(1, 0)] - r[(0, 1)]);
        let sin = axis.norm() / 2.0;
        libm::atan2(sin, cos.clamp(-1.0, 1.0))
    }

    pub fn to_homogeneous(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.rotation);
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.translation);
        m
    }
}

impl Mul for RigidTransform {
    type Output = RigidTransform;

    fn mul(self, rhs: RigidTransform) -> RigidTransform {
        self.compose(&rhs)
    }
}

impl<'a> Mul<&'a RigidTransform> for &'a RigidTransform {
    type Output = RigidTransform;

    fn mul(self, rhs: &'a RigidTransform) -> RigidTransform {
        self.compose(rhs)
    }
}

/// A timestamped rigid-body pose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    timestamp: f64,
    transform: RigidTransform,
}

impl Pose {
    pub fn new(timestamp: f64, transform: RigidTransform) -> Result<Self> {
        if !timestamp.is_finite() || timestamp < 0.0 {
            return Err(Error::InvalidTimestamp(timestamp));
        }
        Ok(Self {
            timestamp,
            transform,
        })
    }

    /// Pose from TUM fields `tx ty tz qx qy qz qw`.
    pub fn from_tum(timestamp: f64, t: [f64; 3], q: [f64; 4]) -> Result<Self> {
        if t.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "translation" });
        }
        let q = Quaternion::new(q[0], q[1], q[2], q[3])?;
        Self::new(
            timestamp,
            RigidTransform::from_quaternion(&q, Vector3::new(t[0], t[1], t[2])),
        )
    }

    pub fn timestamp(&self) -> f64 {
        self.timestamp
    }

    pub fn transform(&self) -> &RigidTransform {
        &self.transform
    }

    pub fn translation(&self) -> &Vector3<f64> {
        self.transform.translation()
    }

    pub fn with_transform(&self, transform: RigidTransform) -> Self {
        Self {
            timestamp: self.timestamp,
            transform,
        }
    }
}
