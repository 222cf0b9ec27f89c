//! One ground-truth/estimate comparison, end to end.

use std::time::Instant;

use trajeval_core::association::DEFAULT_MAX_DIFF;
use trajeval_core::metrics::{ate_with_alignment, DEFAULT_MAX_SAMPLES};
use trajeval_core::{
    associate, associate_interpolated, coverage, rpe, rpe_all_deltas, AlignmentResult,
    CoverageReport, DeltaMode, DeltaSpec, ErrorSeries, MatchedPairs, RpeSeries, Trajectory,
};

use crate::record::{
    AllDeltasRecord, EvaluationRecord, Parameters, Status, StatsRecord, SCHEMA,
};

/// Coverage below this triggers the incomplete-trajectory warning.
pub const COVERAGE_WARNING_THRESHOLD: f64 = 0.99;

pub const FULL_SPAN_WARNING: &str = "warning: a start-to-end window (delta = n) penalizes \
rotational errors in the beginning of a trajectory more than those towards the end; \
prefer --delta-unit all";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalParams {
    pub max_diff: f64,
    pub offset: f64,
    pub interpolate_gt: bool,
    pub align: bool,
    pub delta: DeltaSpec,
    /// Replace the window by the full span of the matched pairs.
    pub full_span: bool,
    pub compute_ate: bool,
    pub compute_rpe: bool,
}

impl Default for EvalParams {
    fn default() -> Self {
        Self {
            max_diff: DEFAULT_MAX_DIFF,
            offset: 0.0,
            interpolate_gt: false,
            align: true,
            delta: DeltaSpec::frames(1),
            full_span: false,
            compute_ate: true,
            compute_rpe: true,
        }
    }
}

impl EvalParams {
    pub fn parameters(&self, delta_used: Option<f64>) -> Parameters {
        Parameters {
            max_diff: self.max_diff,
            offset: self.offset,
            interpolate_gt: self.interpolate_gt,
            align: self.align,
            delta_unit: self.delta.mode.into(),
            delta: match self.delta.mode {
                DeltaMode::AllSampled => None,
                _ => delta_used.or(Some(self.delta.delta)),
            },
            full_span: self.full_span,
            max_samples: self.delta.max_samples,
            seed: self.delta.seed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Evaluation {
    pub pairs: MatchedPairs,
    pub ate: Option<ErrorSeries>,
    pub alignment: Option<AlignmentResult>,
    pub rpe: Option<RpeSeries>,
    pub rpe_all_deltas: Option<(f64, f64)>,
    pub coverage: CoverageReport,
    /// The RPE window after resolving a full-span request.
    pub delta_used: Option<f64>,
    pub wall_seconds: f64,
}

impl Evaluation {
    pub fn low_coverage(&self) -> bool {
        self.coverage.temporal_coverage < COVERAGE_WARNING_THRESHOLD
    }

    pub fn coverage_warning(&self) -> Option<String> {
        self.low_coverage().then(|| {
            format!(
                "warning: the estimate covers only {:.1}% of the ground-truth timespan \
                 (largest gap {:.3} s, {:.1}% of ground-truth poses matched); \
                 motion without estimated poses does not enter ATE or RPE",
                100.0 * self.coverage.temporal_coverage,
                self.coverage.largest_gap,
                100.0 * self.coverage.matched_fraction,
            )
        })
    }

    pub fn to_record(
        &self,
        algorithm: &str,
        sequence: &str,
        gt: &Trajectory,
        est: &Trajectory,
        params: &EvalParams,
    ) -> EvaluationRecord {
        EvaluationRecord {
            schema: SCHEMA.to_string(),
            algorithm: algorithm.to_string(),
            sequence: sequence.to_string(),
            status: Status::Ok,
            error: None,
            gt_poses: gt.len(),
            est_poses: est.len(),
            pairs: self.pairs.len(),
            unmatched_gt: self.pairs.unmatched_gt_count(),
            unmatched_est: self.pairs.unmatched_est_count(),
            ate: self.ate.as_ref().map(|s| StatsRecord::from(s.stats())),
            alignment: self.alignment.as_ref().map(Into::into),
            rpe_trans: self.rpe.as_ref().map(|r| StatsRecord::from(r.trans.stats())),
            rpe_rot: self.rpe.as_ref().map(|r| StatsRecord::from(r.rot.stats())),
            rpe_all_deltas: self.rpe_all_deltas.map(|(trans_rmse, rot_rmse)| AllDeltasRecord {
                trans_rmse,
                rot_rmse,
            }),
            coverage: Some((&self.coverage).into()),
            evaluation_wall_seconds: Some(self.wall_seconds),
            external_runtime_seconds: None,
            parameters: params.parameters(self.delta_used),
        }
    }
}

pub fn associate_with(
    gt: &Trajectory,
    est: &Trajectory,
    params: &EvalParams,
) -> trajeval_core::Result<MatchedPairs> {
    if params.interpolate_gt {
        associate_interpolated(gt, est, params.max_diff, params.offset)
    } else {
        associate(gt, est, params.max_diff, params.offset)
    }
}

/// Associates, aligns and computes every requested metric.
pub fn evaluate(
    gt: &Trajectory,
    est: &Trajectory,
    params: &EvalParams,
) -> trajeval_core::Result<Evaluation> {
    let started = Instant::now();
    let pairs = associate_with(gt, est, params)?;
    let coverage = coverage(gt, &pairs);

    let (ate, alignment) = if params.compute_ate {
        let (series, alignment) = ate_with_alignment(&pairs, params.align)?;
        (Some(series), alignment)
    } else {
        (None, None)
    };

    let mut delta = params.delta;
    let mut delta_used = None;
    if params.full_span {
        match delta.mode {
            DeltaMode::Frames => delta.delta = pairs.len().saturating_sub(1).max(1) as f64,
            DeltaMode::Seconds => delta.delta = pairs.span(),
            DeltaMode::AllSampled => {}
        }
        delta_used = Some(delta.delta);
    }
    let (rpe_series, all_deltas) = if params.compute_rpe {
        let series = rpe(&pairs, &delta)?;
        let all = if delta.mode == DeltaMode::AllSampled {
            Some(rpe_all_deltas(&pairs, delta.max_samples, delta.seed)?)
        } else {
            None
        };
        (Some(series), all)
    } else {
        (None, None)
    };

    Ok(Evaluation {
        pairs,
        ate,
        alignment,
        rpe: rpe_series,
        rpe_all_deltas: all_deltas,
        coverage,
        delta_used,
        wall_seconds: started.elapsed().as_secs_f64(),
    })
}

/// Default all-windows budget, re-exported for CLI defaults.
pub const DEFAULT_SAMPLES: usize = DEFAULT_MAX_SAMPLES;
