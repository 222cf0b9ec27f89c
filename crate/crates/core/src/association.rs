//! Time correspondence between a ground-truth and an estimated trajectory.
//!
//! Two estimators rarely share a clock or a frame rate, so poses are paired
//! by timestamp before any error is computed. The default is nearest-neighbour
//! matching; [`associate_interpolated`] instead resamples the ground truth at
//! the estimate's timestamps.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{Pose, RigidTransform};
use crate::trajectory::Trajectory;

/// Default matching threshold in seconds.
pub const DEFAULT_MAX_DIFF: f64 = 0.02;

/// A ground-truth pose `Q_i` and the estimated pose `P_i` associated with it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosePair {
    pub gt: Pose,
    pub est: Pose,
}

/// Associated pose pairs plus the bookkeeping needed to judge coverage.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchedPairs {
    pairs: Vec<PosePair>,
    unmatched_gt_count: usize,
    unmatched_est_count: usize,
    max_diff: f64,
    offset: f64,
    interpolated: bool,
}

impl MatchedPairs {
    /// Wraps pairs built elsewhere, checking the association invariants.
    pub fn new(pairs: Vec<PosePair>, max_diff: f64, offset: f64) -> Result<Self> {
        check_params(max_diff, offset)?;
        if pairs.is_empty() {
            return Err(Error::InsufficientData { needed: 1, got: 0 });
        }
        for p in &pairs {
            if (p.gt.timestamp() + offset - p.est.timestamp()).abs() > max_diff {
                return Err(Error::InvalidParameter(alloc::format!(
                    "pair at gt time {} exceeds max_diff {}",
                    p.gt.timestamp(),
                    max_diff
                )));
            }
        }
        if pairs
            .windows(2)
            .any(|w| w[1].gt.timestamp() <= w[0].gt.timestamp())
        {
            return Err(Error::InvalidParameter(
                "pairs must be ordered by strictly increasing ground-truth time".into(),
            ));
        }
        Ok(Self {
            pairs,
            unmatched_gt_count: 0,
            unmatched_est_count: 0,
            max_diff,
            offset,
            interpolated: false,
        })
    }

    /// Pairs two equally long trajectories index by index.
    pub fn synchronized(gt: &Trajectory, est: &Trajectory) -> Result<Self> {
        if gt.len() != est.len() {
            return Err(Error::InvalidParameter(alloc::format!(
                "synchronized pairing needs equal lengths, got {} and {}",
                gt.len(),
                est.len()
            )));
        }
        let max_diff = gt
            .poses()
            .iter()
            .zip(est.poses())
            .map(|(g, e)| (g.timestamp() - e.timestamp()).abs())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        let pairs = gt
            .poses()
            .iter()
            .zip(est.poses())
            .map(|(&gt, &est)| PosePair { gt, est })
            .collect();
        Self::new(pairs, max_diff, 0.0)
    }

    pub fn pairs(&self) -> &[PosePair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn unmatched_gt_count(&self) -> usize {
        self.unmatched_gt_count
    }

    pub fn unmatched_est_count(&self) -> usize {
        self.unmatched_est_count
    }

    pub fn max_diff(&self) -> f64 {
        self.max_diff
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// True when ground-truth poses were resampled at estimate timestamps.
    pub fn is_interpolated(&self) -> bool {
        self.interpolated
    }

    /// Ground-truth time span of the pairs.
    pub fn span(&self) -> f64 {
        match (self.pairs.first(), self.pairs.last()) {
            (Some(a), Some(b)) => b.gt.timestamp() - a.gt.timestamp(),
            _ => 0.0,
        }
    }

    /// Same pairs with every estimated pose replaced by `f(est)`.
    pub fn map_estimates(&self, mut f: impl FnMut(&RigidTransform) -> RigidTransform) -> Self {
        let pairs = self
            .pairs
            .iter()
            .map(|p| PosePair {
                gt: p.gt,
                est: p.est.with_transform(f(p.est.transform())),
            })
            .collect();
        Self {
            pairs,
            ..self.clone()
        }
    }
}

fn check_params(max_diff: f64, offset: f64) -> Result<()> {
    if !(max_diff.is_finite() && max_diff > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!(
            "max_diff must be positive and finite, got {max_diff}"
        )));
    }
    if !offset.is_finite() {
        return Err(Error::InvalidParameter("offset must be finite".into()));
    }
    Ok(())
}

/// Greedy globally sorted nearest-neighbour matching.
///
/// Every candidate `(i, j)` with `|t_i + offset − t_j| ≤ max_diff` is ranked
/// by that difference (ties by ground-truth index, then estimate index) and
/// accepted when neither pose is already taken.
pub fn associate(
    gt: &Trajectory,
    est: &Trajectory,
    max_diff: f64,
    offset: f64,
) -> Result<MatchedPairs> {
    check_params(max_diff, offset)?;
    let gt_poses = gt.poses();
    let est_poses = est.poses();

    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    for (i, g) in gt_poses.iter().enumerate() {
        let target = g.timestamp() + offset;
        let start = est_poses.partition_point(|e| e.timestamp() < target - max_diff);
        for (j, e) in est_poses.iter().enumerate().skip(start) {
            let diff = (target - e.timestamp()).abs();
            if e.timestamp() > target + max_diff {
                break;
            }
            if diff <= max_diff {
                candidates.push((diff, i, j));
            }
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut gt_match: Vec<Option<usize>> = vec![None; gt_poses.len()];
    let mut est_taken = vec![false; est_poses.len()];
    for &(_, i, j) in &candidates {
        if gt_match[i].is_none() && !est_taken[j] {
            gt_match[i] = Some(j);
            est_taken[j] = true;
        }
    }

    let pairs: Vec<PosePair> = gt_match
        .iter()
        .enumerate()
        .filter_map(|(i, m)| {
            m.map(|j| PosePair {
                gt: gt_poses[i],
                est: est_poses[j],
            })
        })
        .collect();
    if pairs.is_empty() {
        return Err(no_overlap(gt, est));
    }
    Ok(MatchedPairs {
        unmatched_gt_count: gt_poses.len() - pairs.len(),
        unmatched_est_count: est_poses.len() - pairs.len(),
        pairs,
        max_diff,
        offset,
        interpolated: false,
    })
}

/// Pairs every estimated pose with the ground truth interpolated at
/// `t_est − offset`.
///
/// An estimate is used only if its resampling time lies inside the ground
/// truth range and within `max_diff` of a stored ground-truth sample, so the
/// interpolation never bridges a hole in the reference.
pub fn associate_interpolated(
    gt: &Trajectory,
    est: &Trajectory,
    max_diff: f64,
    offset: f64,
) -> Result<MatchedPairs> {
    check_params(max_diff, offset)?;
    let gt_poses = gt.poses();
    let (gt_start, gt_end) = gt.time_range();

    let mut pairs = Vec::new();
    for e in est.poses() {
        let t = e.timestamp() - offset;
        if t < gt_start || t > gt_end {
            continue;
        }
        let hi = gt_poses.partition_point(|g| g.timestamp() < t);
        let nearest = match hi {
            0 => gt_poses[0].timestamp() - t,
            h if h == gt_poses.len() => t - gt_poses[h - 1].timestamp(),
            h => (gt_poses[h].timestamp() - t).min(t - gt_poses[h - 1].timestamp()),
        };
        if nearest > max_diff {
            continue;
        }
        let q = if gt_poses.len() == 1 {
            gt_poses[0]
        } else {
            interpolate(gt, t)?
        };
        pairs.push(PosePair { gt: q, est: *e });
    }
    if pairs.is_empty() {
        return Err(no_overlap(gt, est));
    }

    let used: Vec<f64> = pairs.iter().map(|p| p.est.timestamp() - offset).collect();
    let covered = gt_poses
        .iter()
        .filter(|g| within(&used, g.timestamp(), max_diff))
        .count();
    Ok(MatchedPairs {
        unmatched_gt_count: gt_poses.len() - covered,
        unmatched_est_count: est.len() - pairs.len(),
        pairs,
        max_diff,
        offset,
        interpolated: true,
    })
}

/// True if some element of the sorted slice lies within `tol` of `t`.
pub(crate) fn within(sorted: &[f64], t: f64, tol: f64) -> bool {
    let k = sorted.partition_point(|&s| s < t);
    let after = sorted.get(k).is_some_and(|&s| s - t <= tol);
    let before = k > 0 && t - sorted[k - 1] <= tol;
    after || before
}

fn no_overlap(gt: &Trajectory, est: &Trajectory) -> Error {
    Error::NoOverlap {
        gt_span: gt.time_range(),
        est_span: est.time_range(),
    }
}

/// Pose at time `t`: linear in translation, shorter-arc slerp in rotation.
pub fn interpolate(traj: &Trajectory, t: f64) -> Result<Pose> {
    if traj.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: traj.len(),
        });
    }
    let (start, end) = traj.time_range();
    if !(t >= start && t <= end) {
        return Err(Error::OutOfRange { t, start, end });
    }
    let poses = traj.poses();
    let idx = poses.partition_point(|p| p.timestamp() < t);
    if poses[idx].timestamp() == t {
        return Ok(poses[idx]);
    }
    let (a, b) = (&poses[idx - 1], &poses[idx]);
    let u = (t - a.timestamp()) / (b.timestamp() - a.timestamp());
    let translation = a.translation() + (b.translation() - a.translation()) * u;
    let rotation = a
        .transform()
        .quaternion()
        .slerp(&b.transform().quaternion(), u);
    Pose::new(t, RigidTransform::from_quaternion(&rotation, translation))
}
