//! Absolute trajectory error, relative pose error and coverage.
//!
//! For matched pairs `(Q_i, P_i)` (ground truth, estimate):
//!
//! * ATE sample: `‖trans(Q_i⁻¹ · S · P_i)‖`, with `S` the rigid alignment.
//! * RPE sample: `E_i = (Q_i⁻¹ Q_j)⁻¹ (P_i⁻¹ P_j)` for a couple `(i, j)`; the
//!   translational error is `‖trans(E_i)‖` and the rotational error its angle.
//!
//! Inverting `E_i` changes neither magnitude, so either orientation of the
//! second factor yields identical series.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::alignment::{horn_align, AlignmentResult};
use crate::association::{within, MatchedPairs, PosePair};
use crate::error::{Error, Result};
use crate::geometry::RigidTransform;
use crate::stats::{summarize, Stats};
use crate::trajectory::Trajectory;

/// Default couple budget for the all-windows RPE.
pub const DEFAULT_MAX_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorKind {
    AteTrans,
    RpeTrans,
    RpeRot,
}

impl ErrorKind {
    pub fn unit(&self) -> &'static str {
        match self {
            ErrorKind::AteTrans | ErrorKind::RpeTrans => "m",
            ErrorKind::RpeRot => "rad",
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ErrorKind::AteTrans => "ate_trans",
            ErrorKind::RpeTrans => "rpe_trans",
            ErrorKind::RpeRot => "rpe_rot",
        }
    }
}

/// Per-timestamp error magnitudes and their summary.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSeries {
    kind: ErrorKind,
    samples: Vec<(f64, f64)>,
    stats: Stats,
}

impl ErrorSeries {
    /// Builds a series from `(timestamp, value)` samples; values must be
    /// finite and non-negative.
    pub fn new(kind: ErrorKind, samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.iter().any(|&(_, v)| v < 0.0) {
            return Err(Error::InvalidParameter("error samples must be non-negative".into()));
        }
        let values: Vec<f64> = samples.iter().map(|s| s.1).collect();
        let stats = summarize(&values)?;
        Ok(Self {
            kind,
            samples,
            stats,
        })
    }

    pub fn kind(&self) -> ErrorKind {
        self.kind
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.1)
    }

    pub fn stats(&self) -> &Stats {
        &self.stats
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// How RPE windows are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeltaMode {
    /// Δ counts pose pairs; `Δ = 1` gives drift per frame.
    Frames,
    /// Δ is a duration; `Δ = 1` gives drift per second.
    Seconds,
    /// Windows of every length, sampled when exhaustive evaluation is too big.
    AllSampled,
}

impl DeltaMode {
    pub fn unit(&self) -> &'static str {
        match self {
            DeltaMode::Frames => "frames",
            DeltaMode::Seconds => "seconds",
            DeltaMode::AllSampled => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaSpec {
    pub mode: DeltaMode,
    pub delta: f64,
    pub max_samples: usize,
    pub seed: u64,
}

impl DeltaSpec {
    pub fn frames(delta: usize) -> Self {
        Self {
            mode: DeltaMode::Frames,
            delta: delta as f64,
            max_samples: DEFAULT_MAX_SAMPLES,
            seed: 0,
        }
    }

    pub fn seconds(delta: f64) -> Self {
        Self {
            mode: DeltaMode::Seconds,
            delta,
            max_samples: DEFAULT_MAX_SAMPLES,
            seed: 0,
        }
    }

    pub fn all_sampled(max_samples: usize, seed: u64) -> Self {
        Self {
            mode: DeltaMode::AllSampled,
            delta: 0.0,
            max_samples,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.mode {
            DeltaMode::Frames if !(self.delta >= 1.0 && libm::trunc(self.delta) == self.delta) => {
                Err(Error::InvalidParameter(alloc::format!(
                    "frame delta must be a positive integer, got {}",
                    self.delta
                )))
            }
            DeltaMode::Seconds if !(self.delta.is_finite() && self.delta > 0.0) => {
                Err(Error::InvalidParameter(alloc::format!(
                    "seconds delta must be positive, got {}",
                    self.delta
                )))
            }
            DeltaMode::AllSampled if self.max_samples == 0 => {
                Err(Error::InvalidParameter("max_samples must be positive".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Translational and rotational RPE over the same couples.
#[derive(Debug, Clone, PartialEq)]
pub struct RpeSeries {
    pub trans: ErrorSeries,
    pub rot: ErrorSeries,
}

/// Aligned ATE, also returning the alignment that was applied.
pub fn ate_with_alignment(
    pairs: &MatchedPairs,
    align: bool,
) -> Result<(ErrorSeries, Option<AlignmentResult>)> {
    let alignment = if align { Some(horn_align(pairs)?) } else { None };
    let s = alignment
        .map(|a| a.transform)
        .unwrap_or_else(RigidTransform::identity);
    let samples = pairs
        .pairs()
        .iter()
        .map(|p| {
            let f = p.gt.transform().inverse().compose(&s.compose(p.est.transform()));
            (p.gt.timestamp(), f.translation_norm())
        })
        .collect();
    Ok((ErrorSeries::new(ErrorKind::AteTrans, samples)?, alignment))
}

/// Absolute trajectory error; `align = false` assumes pre-registered frames.
pub fn ate(pairs: &MatchedPairs, align: bool) -> Result<ErrorSeries> {
    ate_with_alignment(pairs, align).map(|(series, _)| series)
}

/// Relative error of couple `(i, j)`: `(Q_i⁻¹ Q_j)⁻¹ (P_i⁻¹ P_j)`.
pub fn relative_error(a: &PosePair, b: &PosePair) -> RigidTransform {
    let gt_motion = a.gt.transform().relative(b.gt.transform());
    let est_motion = a.est.transform().relative(b.est.transform());
    gt_motion.relative(&est_motion)
}

/// Relative pose error over the couples selected by `spec`.
pub fn rpe(pairs: &MatchedPairs, spec: &DeltaSpec) -> Result<RpeSeries> {
    spec.validate()?;
    let couples = select_couples(pairs, spec);
    if couples.is_empty() {
        return Err(Error::EmptyWindow {
            delta: spec.delta,
            unit: spec.mode.unit(),
            span: pairs.span(),
            pairs: pairs.len(),
        });
    }
    let p = pairs.pairs();
    let (trans, rot): (Vec<_>, Vec<_>) = couples
        .iter()
        .map(|&(i, j)| {
            let e = relative_error(&p[i], &p[j]);
            let t = p[i].gt.timestamp();
            ((t, e.translation_norm()), (t, e.rotation_angle()))
        })
        .unzip();
    Ok(RpeSeries {
        trans: ErrorSeries::new(ErrorKind::RpeTrans, trans)?,
        rot: ErrorSeries::new(ErrorKind::RpeRot, rot)?,
    })
}

fn select_couples(pairs: &MatchedPairs, spec: &DeltaSpec) -> Vec<(usize, usize)> {
    let n = pairs.len();
    let p = pairs.pairs();
    match spec.mode {
        DeltaMode::Frames => {
            let d = spec.delta as usize;
            (0..n.saturating_sub(d)).map(|i| (i, i + d)).collect()
        }
        DeltaMode::Seconds => (0..n)
            .filter_map(|i| {
                let t0 = p[i].gt.timestamp();
                let j = p.partition_point(|q| q.gt.timestamp() - t0 < spec.delta);
                (j < n).then_some((i, j))
            })
            .collect(),
        DeltaMode::AllSampled => {
            if n < 2 {
                return Vec::new();
            }
            if couple_count(n) <= spec.max_samples {
                (0..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .collect()
            } else {
                let mut drawn: Vec<(usize, usize)> = draw_couples(n, spec.max_samples, spec.seed)
                    .into_iter()
                    .map(|(i, d)| (i, i + d))
                    .collect();
                drawn.sort_unstable();
                drawn
            }
        }
    }
}

fn couple_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Stratified draw of `(start, delta)`: delta uniform on `[1, n−1]`, then the
/// start uniform over the valid range for that delta.
fn draw_couples(n: usize, count: usize, seed: u64) -> Vec<(usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let d = rng.random_range(1..n);
            let i = rng.random_range(0..n - d);
            (i, d)
        })
        .collect()
}

/// RPE averaged over every window length `Δ = 1 … n−1`, as
/// `(translational RMSE, rotational RMSE)`.
///
/// When the `n(n−1)/2` couples fit in `max_samples` the average is exact;
/// otherwise `max_samples` couples are drawn up front from the seeded
/// generator and each window length that received samples contributes its
/// sample RMSE.
pub fn rpe_all_deltas(pairs: &MatchedPairs, max_samples: usize, seed: u64) -> Result<(f64, f64)> {
    let n = pairs.len();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    if max_samples == 0 {
        return Err(Error::InvalidParameter("max_samples must be positive".into()));
    }

    if couple_count(n) <= max_samples {
        let (mut trans, mut rot) = (0.0, 0.0);
        for d in 1..n {
            let series = rpe(pairs, &DeltaSpec::frames(d))?;
            trans += series.trans.stats().rmse;
            rot += series.rot.stats().rmse;
        }
        let windows = (n - 1) as f64;
        return Ok((trans / windows, rot / windows));
    }

    let p = pairs.pairs();
    // (Σ trans², Σ rot², count) per window length
    let mut acc = alloc::vec![(0.0f64, 0.0f64, 0usize); n];
    for (i, d) in draw_couples(n, max_samples, seed) {
        let e = relative_error(&p[i], &p[i + d]);
        let slot = &mut acc[d];
        slot.0 += e.translation_norm() * e.translation_norm();
        slot.1 += e.rotation_angle() * e.rotation_angle();
        slot.2 += 1;
    }
    let (mut trans, mut rot, mut windows) = (0.0, 0.0, 0usize);
    for &(st, sr, c) in acc.iter().filter(|a| a.2 > 0) {
        trans += libm::sqrt(st / c as f64);
        rot += libm::sqrt(sr / c as f64);
        windows += 1;
    }
    Ok((trans / windows as f64, rot / windows as f64))
}

/// How much of the ground truth the estimate accounts for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageReport {
    /// Matched ground-truth poses over all ground-truth poses.
    pub matched_fraction: f64,
    /// Share of the ground-truth timespan that is covered.
    pub temporal_coverage: f64,
    /// Longest stretch of ground-truth time between covered samples, seconds.
    pub largest_gap: f64,
}

/// Coverage of `gt` by the estimate poses in `pairs`.
///
/// A ground-truth sample is covered when a matched estimate lies within the
/// association threshold of it. Each sample stands for the time between the
/// midpoints to its neighbours (clipped to the trajectory ends); covered
/// time is the total over covered samples and the largest gap is the longest
/// run of uncovered ones. For a gap of length `L` the measured uncovered
/// time is within one sample spacing of `L`.
pub fn coverage(gt: &Trajectory, pairs: &MatchedPairs) -> CoverageReport {
    let mut est_times: Vec<f64> = pairs
        .pairs()
        .iter()
        .map(|p| p.est.timestamp() - pairs.offset())
        .collect();
    est_times.sort_by(f64::total_cmp);
    let tol = pairs.max_diff();
    let stamps: Vec<f64> = gt.timestamps().collect();
    let covered: Vec<bool> = stamps.iter().map(|&t| within(&est_times, t, tol)).collect();

    let matched = if pairs.is_interpolated() {
        covered.iter().filter(|&&c| c).count()
    } else {
        let mut gt_times: Vec<f64> = pairs.pairs().iter().map(|p| p.gt.timestamp()).collect();
        gt_times.sort_by(f64::total_cmp);
        stamps
            .iter()
            .filter(|&&t| gt_times.binary_search_by(|x| x.total_cmp(&t)).is_ok())
            .count()
    };
    let matched_fraction = matched as f64 / stamps.len() as f64;

    let span = gt.duration();
    let n = stamps.len();
    if n < 2 || span <= 0.0 {
        let any = covered.iter().any(|&c| c);
        return CoverageReport {
            matched_fraction,
            temporal_coverage: if any { 1.0 } else { 0.0 },
            largest_gap: 0.0,
        };
    }

    let boundary = |k: usize| match k {
        0 => stamps[0],
        k if k == n => stamps[n - 1],
        k => 0.5 * (stamps[k - 1] + stamps[k]),
    };
    let (mut covered_time, mut largest_gap, mut run_start) = (0.0, 0.0f64, None);
    for (k, &is_covered) in covered.iter().enumerate() {
        if is_covered {
            covered_time += boundary(k + 1) - boundary(k);
            if let Some(s) = run_start.take() {
                largest_gap = largest_gap.max(boundary(k) - boundary(s));
            }
        } else if run_start.is_none() {
            run_start = Some(k);
        }
    }
    if let Some(s) = run_start {
        largest_gap = largest_gap.max(boundary(n) - boundary(s));
    }

    CoverageReport {
        matched_fraction,
        temporal_coverage: (covered_time / span).clamp(0.0, 1.0),
        largest_gap: largest_gap.min(span),
    }
}

#[cfg(test)]
mod tests {
    use nalgebra::Vector3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::association::associate;
    use crate::geometry::{Pose, Quaternion};

    fn random_transform(rng: &mut impl Rng) -> RigidTransform {
        let q = Quaternion::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        )
        .unwrap();
        let t = Vector3::new(
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
        );
        RigidTransform::from_quaternion(&q, t)
    }

    fn trajectory(transforms: &[RigidTransform], dt: f64) -> Trajectory {
        let poses = transforms
            .iter()
            .enumerate()
            .map(|(k, t)| Pose::new(k as f64 * dt, *t).unwrap())
            .collect();
        Trajectory::new("t", poses).unwrap().0
    }

    fn line(n: usize) -> Vec<RigidTransform> {
        (0..n)
            .map(|k| RigidTransform::from_translation(Vector3::new(k as f64, 0.0, 0.0)))
            .collect()
    }

    #[test]
    fn ate_self_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ts: Vec<_> = (0..30).map(|_| random_transform(&mut rng)).collect();
        let t = trajectory(&ts, 0.1);
        let pairs = MatchedPairs::synchronized(&t, &t).unwrap();
        let series = ate(&pairs, true).unwrap();
        assert!(series.stats().rmse < 1e-12);
        assert_eq!(ate(&pairs, false).unwrap().stats().rmse, 0.0);
    }

    #[test]
    fn ate_without_alignment_needs_one_pair() {
        let t = trajectory(&line(1), 0.1);
        let pairs = MatchedPairs::synchronized(&t, &t).unwrap();
        assert!(ate(&pairs, false).is_ok());
        assert!(matches!(ate(&pairs, true), Err(Error::InsufficientData { .. })));
    }

    #[test]
    fn displaced_pose_corrupts_two_relative_motions() {
        let gt = line(10);
        let mut est = gt.clone();
        est[4] = RigidTransform::from_translation(Vector3::new(4.1, 0.0, 0.0));
        let pairs = MatchedPairs::synchronized(&trajectory(&gt, 0.1), &trajectory(&est, 0.1)).unwrap();
        let r = rpe(&pairs, &DeltaSpec::frames(1)).unwrap();
        let nonzero: Vec<f64> = r.trans.values().filter(|&v| v > 1e-12).collect();
        assert_eq!(nonzero.len(), 2);
        assert!(nonzero.iter().all(|v| (v - 0.1).abs() < 1e-12));
        assert!(r.rot.values().all(|v| v == 0.0));
    }

    #[test]
    fn frames_mode_counts() {
        let t = trajectory(&line(7), 0.1);
        let pairs = MatchedPairs::synchronized(&t, &t).unwrap();
        for d in 1..7 {
            assert_eq!(rpe(&pairs, &DeltaSpec::frames(d)).unwrap().trans.len(), 7 - d);
        }
        assert!(matches!(
            rpe(&pairs, &DeltaSpec::frames(7)),
            Err(Error::EmptyWindow { .. })
        ));
    }

    #[test]
    fn seconds_mode_never_undershoots() {
        // irregular sampling: partner is the first stamp at least delta later
        let stamps = [0.0, 0.4, 0.9, 1.0, 1.6, 2.2];
        let poses = stamps
            .iter()
            .map(|&t| Pose::new(t, RigidTransform::identity()).unwrap())
            .collect();
        let t = Trajectory::new("t", poses).unwrap().0;
        let pairs = MatchedPairs::synchronized(&t, &t).unwrap();
        let r = rpe(&pairs, &DeltaSpec::seconds(1.0)).unwrap();
        let starts: Vec<f64> = r.trans.samples().iter().map(|s| s.0).collect();
        assert_eq!(starts, vec![0.0, 0.4, 0.9, 1.0]);
        let couples = select_couples(&pairs, &DeltaSpec::seconds(1.0));
        assert_eq!(couples, vec![(0, 3), (1, 4), (2, 5), (3, 5)]);
    }

    #[test]
    fn invalid_delta_specs() {
        assert!(DeltaSpec::frames(0).validate().is_err());
        assert!(DeltaSpec::seconds(-1.0).validate().is_err());
        assert!(DeltaSpec::all_sampled(0, 1).validate().is_err());
        let mut fractional = DeltaSpec::frames(1);
        fractional.delta = 1.5;
        assert!(fractional.validate().is_err());
    }

    #[test]
    fn all_sampled_draw_is_deterministic_and_in_range() {
        let a = draw_couples(50, 1000, 9);
        assert_eq!(a, draw_couples(50, 1000, 9));
        assert_ne!(a, draw_couples(50, 1000, 10));
        assert!(a.iter().all(|&(i, d)| d >= 1 && i + d < 50));
    }

    #[test]
    fn coverage_complete_and_truncated() {
        let gt = trajectory(&line(101), 0.1);
        let pairs = associate(&gt, &gt, 0.02, 0.0).unwrap();
        let c = coverage(&gt, &pairs);
        assert_eq!(c.matched_fraction, 1.0);
        assert!((c.temporal_coverage - 1.0).abs() < 1e-12);
        assert!(c.largest_gap <= 0.1 + 1e-12);

        let est = trajectory(&line(51), 0.1);
        let pairs = associate(&gt, &est, 0.02, 0.0).unwrap();
        let c = coverage(&gt, &pairs);
        assert!((c.temporal_coverage - 0.5).abs() <= 0.1 / 10.0 + 1e-12);
        assert!((c.largest_gap - 5.0).abs() <= 0.1 + 1e-12);
        assert!((c.matched_fraction - 51.0 / 101.0).abs() < 1e-12);
    }
}
