//! Seeded synthetic ground truth and controlled degradations.
//!
//! Randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`).
//! A uniform variate is `(next_u64 >> 11) · 2⁻⁵³`, and each standard normal
//! consumes two uniforms through the Box–Muller cosine branch:
//! `√(−2 ln(1 − u₁)) · cos(2π u₂)`. The sine branch is discarded so every
//! normal costs exactly two 64-bit draws.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use nalgebra::{Matrix3, Vector3};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{Pose, Quaternion, RigidTransform};
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shape {
    Line,
    Circle,
    FigureEight,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionSpec {
    pub shape: Shape,
    /// Seconds.
    pub duration: f64,
    /// Hz.
    pub rate: f64,
    /// Meters: line length, circle radius, or figure-eight half width.
    pub scale: f64,
    pub seed: u64,
}

impl MotionSpec {
    pub fn new(shape: Shape, duration: f64, rate: f64) -> Self {
        Self {
            shape,
            duration,
            rate,
            scale: 1.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("duration", self.duration), ("rate", self.rate), ("scale", self.scale)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(alloc::format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Sample count: every `k / rate` up to and including `duration`.
    pub fn pose_count(&self) -> usize {
        libm::floor(self.duration * self.rate + 1e-9) as usize + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Degradation {
    /// Independent perturbation of every pose.
    IidNoise { sigma_trans: f64, sigma_rot: f64 },
    /// Per-step noise accumulated along the trajectory.
    RandomWalkDrift { sigma_trans: f64, sigma_rot: f64 },
    /// Removes every pose with timestamp in `[start, end]`.
    Gap { start: f64, end: f64 },
    /// Removes every pose after `cutoff`.
    Truncate { cutoff: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegradationSpec {
    pub kind: Degradation,
    pub seed: u64,
}

impl DegradationSpec {
    pub fn new(kind: Degradation, seed: u64) -> Self {
        Self { kind, seed }
    }

    /// `duration` is the length of the trajectory being degraded.
    pub fn validate(&self, duration: f64) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.into()));
        match self.kind {
            Degradation::IidNoise { sigma_trans, sigma_rot }
            | Degradation::RandomWalkDrift { sigma_trans, sigma_rot } => {
                if !(sigma_trans >= 0.0 && sigma_rot >= 0.0)
                    || !sigma_trans.is_finite()
                    || !sigma_rot.is_finite()
                {
                    return bad("noise sigmas must be finite and non-negative");
                }
            }
            Degradation::Gap { start, end } => {
                if !(start >= 0.0 && start < end && end <= duration) {
                    return bad("gap must satisfy 0 <= start < end <= duration");
                }
            }
            Degradation::Truncate { cutoff } => {
                if !(cutoff > 0.0 && cutoff <= duration) {
                    return bad("cutoff must satisfy 0 < cutoff <= duration");
                }
            }
        }
        Ok(())
    }
}

/// Portable Gaussian source; see the module docs for the exact recipe.
pub struct GaussianSource {
    rng: ChaCha8Rng,
}

impl GaussianSource {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn standard_normal(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        libm::sqrt(-2.0 * libm::log(1.0 - u1)) * libm::cos(TAU * u2)
    }

    pub fn normal_vector(&mut self, sigma: f64) -> Vector3<f64> {
        let x = self.standard_normal();
        let y = self.standard_normal();
        let z = self.standard_normal();
        Vector3::new(x, y, z) * sigma
    }

    /// Uniform direction on the unit sphere.
    pub fn unit_vector(&mut self) -> Vector3<f64> {
        let z = 2.0 * self.uniform() - 1.0;
        let phi = TAU * self.uniform();
        let r = libm::sqrt((1.0 - z * z).max(0.0));
        Vector3::new(r * libm::cos(phi), r * libm::sin(phi), z)
    }

    /// Rotation with Gaussian angle about a uniform axis.
    pub fn rotation(&mut self, sigma: f64) -> Matrix3<f64> {
        let axis = self.unit_vector();
        let angle = self.standard_normal() * sigma;
        axis_angle_matrix(&axis, angle)
    }
}

fn axis_angle_matrix(axis: &Vector3<f64>, angle: f64) -> Matrix3<f64> {
    Quaternion::from_axis_angle(axis, angle)
        .map(|q| q.to_rotation_matrix())
        .unwrap_or_else(|_| Matrix3::identity())
}

/// Position and velocity along the analytic path at phase `u ∈ [0, 1]`.
fn path(shape: Shape, scale: f64, wobble: (f64, f64), u: f64) -> (Vector3<f64>, Vector3<f64>) {
    let (amp, phase) = wobble;
    match shape {
        Shape::Line => (Vector3::new(scale * u, 0.0, 0.0), Vector3::new(scale, 0.0, 0.0)),
        Shape::Circle => {
            let th = TAU * u;
            let (s, c) = (libm::sin(th), libm::cos(th));
            let zs = libm::sin(2.0 * th + phase);
            let zc = libm::cos(2.0 * th + phase);
            (
                Vector3::new(scale * c, scale * s, amp * zs),
                Vector3::new(-scale * TAU * s, scale * TAU * c, amp * 2.0 * TAU * zc),
            )
        }
        Shape::FigureEight => {
            // lemniscate of Gerono
            let th = TAU * u;
            let (s, c) = (libm::sin(th), libm::cos(th));
            let c2 = libm::cos(2.0 * th);
            let zs = libm::sin(th + phase);
            let zc = libm::cos(th + phase);
            (
                Vector3::new(scale * s, scale * s * c, amp * zs),
                Vector3::new(scale * TAU * c, scale * TAU * c2, amp * TAU * zc),
            )
        }
    }
}

/// Orientation whose x axis points along `velocity`, z axis as close to
/// world up as possible.
fn heading(velocity: &Vector3<f64>) -> Matrix3<f64> {
    let forward = velocity.normalize();
    let up = Vector3::z();
    let mut left = up.cross(&forward);
    if left.norm() < 1e-9 {
        left = Vector3::y();
    }
    let left = left.normalize();
    let top = forward.cross(&left);
    Matrix3::from_columns(&[forward, left, top])
}

/// Samples the analytic path at `k / rate` for `k = 0 …`, up to `duration`.
pub fn generate(spec: &MotionSpec) -> Result<Trajectory> {
    spec.validate()?;
    let wobble = if spec.shape == Shape::Line {
        (0.0, 0.0)
    } else {
        let mut g = GaussianSource::new(spec.seed);
        (0.1 * spec.scale * g.uniform(), TAU * g.uniform() - PI)
    };
    let poses = (0..spec.pose_count())
        .map(|k| {
            let t = k as f64 / spec.rate;
            let u = (t / spec.duration).min(1.0);
            let (position, velocity) = path(spec.shape, spec.scale, wobble, u);
            Pose::new(
                t,
                RigidTransform::from_parts_unchecked(heading(&velocity), position),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let label = match spec.shape {
        Shape::Line => "line",
        Shape::Circle => "circle",
        Shape::FigureEight => "figure_eight",
    };
    Trajectory::from_sorted(label, poses)
}

/// Applies one degradation. Surviving poses keep their timestamps.
pub fn degrade(traj: &Trajectory, spec: &DegradationSpec) -> Result<Trajectory> {
    spec.validate(traj.last().timestamp())?;
    let mut noise = GaussianSource::new(spec.seed);
    let poses: Vec<Pose> = match spec.kind {
        Degradation::IidNoise { sigma_trans, sigma_rot } => traj
            .poses()
            .iter()
            .map(|p| {
                let dt = noise.normal_vector(sigma_trans);
                let dr = noise.rotation(sigma_rot);
                perturb(p, &dt, &dr)
            })
            .collect(),
        Degradation::RandomWalkDrift { sigma_trans, sigma_rot } => {
            let mut drift_t = Vector3::zeros();
            let mut drift_r = Matrix3::identity();
            traj.poses()
                .iter()
                .enumerate()
                .map(|(k, p)| {
                    if k > 0 {
                        drift_t += noise.normal_vector(sigma_trans);
                        drift_r *= noise.rotation(sigma_rot);
                    }
                    perturb(p, &drift_t, &drift_r)
                })
                .collect()
        }
        Degradation::Gap { start, end } => traj
            .poses()
            .iter()
            .filter(|p| p.timestamp() < start || p.timestamp() > end)
            .copied()
            .collect(),
        Degradation::Truncate { cutoff } => traj
            .poses()
            .iter()
            .filter(|p| p.timestamp() <= cutoff)
            .copied()
            .collect(),
    };
    if poses.is_empty() {
        return Err(Error::EmptyResult);
    }
    let mut out = Trajectory::from_sorted(traj.label(), poses)?;
    out.set_label(traj.label());
    Ok(out)
}

/// World-frame translation offset, body-frame rotation perturbation.
fn perturb(p: &Pose, dt: &Vector3<f64>, dr: &Matrix3<f64>) -> Pose {
    let t = p.transform();
    p.with_transform(RigidTransform::from_parts_unchecked(
        t.rotation() * dr,
        t.translation() + dt,
    ))
}
