//! Machine-readable evaluation results.
//!
//! The JSON form of [`EvaluationRecord`] is the structured output of
//! `trajeval ate|rpe --format json` and of every report entry. Field names
//! and meanings are listed in the README; unknown fields are rejected on
//! input so a record file written by a newer schema fails loudly.

use serde::{Deserialize, Serialize};
use trajeval_core::{AlignmentResult, CoverageReport, DeltaMode, Stats};

pub const SCHEMA: &str = "trajeval.evaluation/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Failed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatsRecord {
    pub rmse: f64,
    pub mean: f64,
    pub median: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl From<&Stats> for StatsRecord {
    fn from(s: &Stats) -> Self {
        Self {
            rmse: s.rmse,
            mean: s.mean,
            median: s.median,
            std: s.std,
            min: s.min,
            max: s.max,
            count: s.count,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverageRecord {
    pub matched_fraction: f64,
    pub temporal_coverage: f64,
    pub largest_gap: f64,
}

impl From<&CoverageReport> for CoverageRecord {
    fn from(c: &CoverageReport) -> Self {
        Self {
            matched_fraction: c.matched_fraction,
            temporal_coverage: c.temporal_coverage,
            largest_gap: c.largest_gap,
        }
    }
}

/// The rigid transform applied to the estimate, TUM quaternion order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlignmentRecord {
    pub translation: [f64; 3],
    pub quaternion: [f64; 4],
    pub residual_rmse: f64,
}

impl From<&AlignmentResult> for AlignmentRecord {
    fn from(a: &AlignmentResult) -> Self {
        let t = a.transform.translation();
        Self {
            translation: [t.x, t.y, t.z],
            quaternion: a.transform.quaternion().canonical().to_array(),
            residual_rmse: a.residual_rmse,
        }
    }
}

/// RPE averaged over every window length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AllDeltasRecord {
    pub trans_rmse: f64,
    pub rot_rmse: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaUnit {
    Frames,
    Seconds,
    All,
}

impl From<DeltaMode> for DeltaUnit {
    fn from(m: DeltaMode) -> Self {
        match m {
            DeltaMode::Frames => DeltaUnit::Frames,
            DeltaMode::Seconds => DeltaUnit::Seconds,
            DeltaMode::AllSampled => DeltaUnit::All,
        }
    }
}

impl From<DeltaUnit> for DeltaMode {
    fn from(u: DeltaUnit) -> Self {
        match u {
            DeltaUnit::Frames => DeltaMode::Frames,
            DeltaUnit::Seconds => DeltaMode::Seconds,
            DeltaUnit::All => DeltaMode::AllSampled,
        }
    }
}

/// Parameters the numbers were produced with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    pub max_diff: f64,
    pub offset: f64,
    pub interpolate_gt: bool,
    pub align: bool,
    pub delta_unit: DeltaUnit,
    /// Window actually used; `null` in `all` mode.
    pub delta: Option<f64>,
    pub full_span: bool,
    pub max_samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluationRecord {
    pub schema: String,
    pub algorithm: String,
    pub sequence: String,
    pub status: Status,
    pub error: Option<String>,
    pub gt_poses: usize,
    pub est_poses: usize,
    pub pairs: usize,
    pub unmatched_gt: usize,
    pub unmatched_est: usize,
    pub ate: Option<StatsRecord>,
    pub alignment: Option<AlignmentRecord>,
    pub rpe_trans: Option<StatsRecord>,
    pub rpe_rot: Option<StatsRecord>,
    pub rpe_all_deltas: Option<AllDeltasRecord>,
    pub coverage: Option<CoverageRecord>,
    pub evaluation_wall_seconds: Option<f64>,
    pub external_runtime_seconds: Option<f64>,
    pub parameters: Parameters,
}

impl EvaluationRecord {
    pub fn failed(algorithm: &str, sequence: &str, error: String, parameters: Parameters) -> Self {
        Self {
            schema: SCHEMA.to_string(),
            algorithm: algorithm.to_string(),
            sequence: sequence.to_string(),
            status: Status::Failed,
            error: Some(error),
            gt_poses: 0,
            est_poses: 0,
            pairs: 0,
            unmatched_gt: 0,
            unmatched_est: 0,
            ate: None,
            alignment: None,
            rpe_trans: None,
            rpe_rot: None,
            rpe_all_deltas: None,
            coverage: None,
            evaluation_wall_seconds: None,
            external_runtime_seconds: None,
            parameters,
        }
    }

    /// Headline translational RPE: the all-windows average when present.
    pub fn rpe_trans_headline(&self) -> Option<f64> {
        self.rpe_all_deltas
            .map(|a| a.trans_rmse)
            .or(self.rpe_trans.map(|s| s.rmse))
    }

    pub fn rpe_rot_headline(&self) -> Option<f64> {
        self.rpe_all_deltas
            .map(|a| a.rot_rmse)
            .or(self.rpe_rot.map(|s| s.rmse))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}
