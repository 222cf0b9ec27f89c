//! Closed-form least-squares rigid alignment of the estimate onto ground truth.
//!
//! Horn's optimum is computed through the SVD of the 3×3 cross-covariance
//! (the Umeyama/Kabsch construction). Only pose translations enter the
//! objective, and scale is fixed to one.

use alloc::vec::Vec;

use nalgebra::{Matrix3, SVD, Vector3};

use crate::association::MatchedPairs;
use crate::error::{Error, Result};
use crate::geometry::RigidTransform;

/// The transform `S` mapping estimate positions onto ground truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignmentResult {
    pub transform: RigidTransform,
    /// RMSE of `‖q_i − S p_i‖` over the pairs, which is the aligned ATE RMSE.
    pub residual_rmse: f64,
    pub pair_count: usize,
}

/// Aligns the estimated positions of `pairs` onto their ground-truth partners.
pub fn horn_align(pairs: &MatchedPairs) -> Result<AlignmentResult> {
    let (gt, est): (Vec<_>, Vec<_>) = pairs
        .pairs()
        .iter()
        .map(|p| (*p.gt.translation(), *p.est.translation()))
        .unzip();
    align_points(&gt, &est)
}

/// Rigid `S` minimizing `Σ ‖gt_i − S est_i‖²`.
pub fn align_points(gt: &[Vector3<f64>], est: &[Vector3<f64>]) -> Result<AlignmentResult> {
    if gt.len() != est.len() {
        return Err(Error::InvalidParameter(alloc::format!(
            "point sets differ in size ({} vs {})",
            gt.len(),
            est.len()
        )));
    }
    let n = gt.len();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }

    let gt_centroid = centroid(gt);
    let est_centroid = centroid(est);
    if is_collapsed(gt, &gt_centroid) || is_collapsed(est, &est_centroid) {
        return Err(Error::DegenerateGeometry(
            "all positions coincide, rotation is unobservable",
        ));
    }

    let mut cross = Matrix3::zeros();
    for (g, e) in gt.iter().zip(est) {
        cross += (g - gt_centroid) * (e - est_centroid).transpose();
    }
    let svd = SVD::new(cross, true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::DegenerateGeometry("SVD of cross-covariance failed")),
    };
    // Flip the axis of the smallest singular value when U·Vᵀ is a reflection.
    let sign = if (u * v_t).determinant() < 0.0 { -1.0 } else { 1.0 };
    let rotation = u * Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, sign)) * v_t;
    let translation = gt_centroid - rotation * est_centroid;
    let transform = RigidTransform::from_parts_unchecked(rotation, translation);

    let sum_sq: f64 = gt
        .iter()
        .zip(est)
        .map(|(g, e)| (g - transform.transform_point(e)).norm_squared())
        .sum();
    Ok(AlignmentResult {
        transform,
        residual_rmse: libm::sqrt(sum_sq / n as f64),
        pair_count: n,
    })
}

fn centroid(points: &[Vector3<f64>]) -> Vector3<f64> {
    points.iter().sum::<Vector3<f64>>() / points.len() as f64
}

fn is_collapsed(points: &[Vector3<f64>], centroid: &Vector3<f64>) -> bool {
    let scale = centroid.norm().max(1.0);
    points
        .iter()
        .all(|p| (p - centroid).norm() <= 1e-12 * scale)
}
