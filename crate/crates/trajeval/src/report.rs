//! Batch benchmark: evaluate every configured entry and write the aggregate.
//!
//! Output layout under the report directory:
//!
//! ```text
//! records/<algorithm>__<sequence>.json   one EvaluationRecord per entry
//! summary.csv                            one row per entry
//! summary.json                           array of all records
//! benchmark.svg                          grouped bar charts
//! ```
//!
//! Entries run in parallel; the aggregate is assembled in config order so
//! the files do not depend on scheduling.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{EntryConfig, ReportConfig};
use crate::evaluate::{evaluate, COVERAGE_WARNING_THRESHOLD};
use crate::plot::benchmark_svg;
use crate::record::{EvaluationRecord, Status, StatsRecord};
use crate::tum::read_tum_file;

#[derive(Debug, Clone, Copy, Default)]
pub struct ReportOptions {
    /// Store the evaluation wall time in records. Off by default because it
    /// makes outputs differ between runs.
    pub include_timing: bool,
}

/// Why an entry failed.
#[derive(Debug, Clone, PartialEq)]
pub enum EntryFailure {
    /// A trajectory file could not be read or parsed.
    Input,
    Evaluation(trajeval_core::Error),
}

#[derive(Debug)]
pub struct ReportOutcome {
    pub records: Vec<EvaluationRecord>,
    /// Parallel to `records`.
    pub failures: Vec<Option<EntryFailure>>,
    pub output_dir: PathBuf,
}

impl ReportOutcome {
    pub fn failed_count(&self) -> usize {
        self.records
            .iter()
            .filter(|r| r.status == Status::Failed)
            .count()
    }

    pub fn all_failed(&self) -> bool {
        self.failed_count() == self.records.len()
    }
}

/// Writes `contents` to a temporary sibling and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> io::Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "path has no file name"))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)
}

/// Label made safe for use in a file name.
pub fn file_stem(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') {
                c
            } else {
                '_'
            }
        })
        .collect::<String>()
        .trim_start_matches('.')
        .to_string()
}

pub fn record_file_name(record: &EvaluationRecord) -> String {
    format!(
        "{}__{}.json",
        file_stem(&record.algorithm),
        file_stem(&record.sequence)
    )
}

fn evaluate_entry(
    config: &ReportConfig,
    entry: &EntryConfig,
    options: ReportOptions,
) -> (EvaluationRecord, Option<EntryFailure>) {
    let params = config.params_for(Some(entry));
    let fail = |message: String| {
        let mut r = EvaluationRecord::failed(
            &entry.algorithm,
            &entry.sequence,
            message,
            params.parameters(None),
        );
        r.external_runtime_seconds = entry.runtime_seconds;
        r
    };
    let gt = match read_tum_file(&entry.groundtruth) {
        Ok((t, _)) => t,
        Err(e) => {
            let msg = format!("groundtruth {}: {e}", entry.groundtruth.display());
            return (fail(msg), Some(EntryFailure::Input));
        }
    };
    let est = match read_tum_file(&entry.estimate) {
        Ok((t, _)) => t,
        Err(e) => {
            let msg = format!("estimate {}: {e}", entry.estimate.display());
            return (fail(msg), Some(EntryFailure::Input));
        }
    };
    match evaluate(&gt, &est, &params) {
        Ok(eval) => {
            let mut r = eval.to_record(&entry.algorithm, &entry.sequence, &gt, &est, &params);
            r.external_runtime_seconds = entry.runtime_seconds;
            if !options.include_timing {
                r.evaluation_wall_seconds = None;
            }
            (r, None)
        }
        Err(e) => {
            let mut r = fail(e.to_string());
            r.gt_poses = gt.len();
            r.est_poses = est.len();
            (r, Some(EntryFailure::Evaluation(e)))
        }
    }
}

#[derive(Serialize)]
struct SummaryRow<'a> {
    algorithm: &'a str,
    sequence: &'a str,
    status: Status,
    error: Option<&'a str>,
    gt_poses: usize,
    est_poses: usize,
    pairs: usize,
    unmatched_gt: usize,
    unmatched_est: usize,
    ate_rmse: Option<f64>,
    ate_mean: Option<f64>,
    ate_median: Option<f64>,
    ate_std: Option<f64>,
    ate_min: Option<f64>,
    ate_max: Option<f64>,
    rpe_trans_rmse: Option<f64>,
    rpe_trans_mean: Option<f64>,
    rpe_trans_median: Option<f64>,
    rpe_trans_std: Option<f64>,
    rpe_trans_min: Option<f64>,
    rpe_trans_max: Option<f64>,
    rpe_rot_rmse: Option<f64>,
    rpe_rot_mean: Option<f64>,
    rpe_rot_median: Option<f64>,
    rpe_rot_std: Option<f64>,
    rpe_rot_min: Option<f64>,
    rpe_rot_max: Option<f64>,
    rpe_all_trans_rmse: Option<f64>,
    rpe_all_rot_rmse: Option<f64>,
    matched_fraction: Option<f64>,
    temporal_coverage: Option<f64>,
    largest_gap: Option<f64>,
    coverage_flag: &'static str,
    external_runtime_seconds: Option<f64>,
    evaluation_wall_seconds: Option<f64>,
}

type Six = [Option<f64>; 6];

fn six(s: Option<StatsRecord>) -> Six {
    match s {
        Some(s) => [s.rmse, s.mean, s.median, s.std, s.min, s.max].map(Some),
        None => [None; 6],
    }
}

impl<'a> SummaryRow<'a> {
    fn from_record(r: &'a EvaluationRecord) -> Self {
        let [ate_rmse, ate_mean, ate_median, ate_std, ate_min, ate_max] = six(r.ate);
        let [rpe_trans_rmse, rpe_trans_mean, rpe_trans_median, rpe_trans_std, rpe_trans_min, rpe_trans_max] =
            six(r.rpe_trans);
        let [rpe_rot_rmse, rpe_rot_mean, rpe_rot_median, rpe_rot_std, rpe_rot_min, rpe_rot_max] =
            six(r.rpe_rot);
        let coverage_flag = match (&r.status, &r.coverage) {
            (Status::Failed, _) | (_, None) => "",
            (_, Some(c)) if c.temporal_coverage < COVERAGE_WARNING_THRESHOLD => "low_coverage",
            _ => "ok",
        };
        SummaryRow {
            algorithm: &r.algorithm,
            sequence: &r.sequence,
            status: r.status,
            error: r.error.as_deref(),
            gt_poses: r.gt_poses,
            est_poses: r.est_poses,
            pairs: r.pairs,
            unmatched_gt: r.unmatched_gt,
            unmatched_est: r.unmatched_est,
            ate_rmse,
            ate_mean,
            ate_median,
            ate_std,
            ate_min,
            ate_max,
            rpe_trans_rmse,
            rpe_trans_mean,
            rpe_trans_median,
            rpe_trans_std,
            rpe_trans_min,
            rpe_trans_max,
            rpe_rot_rmse,
            rpe_rot_mean,
            rpe_rot_median,
            rpe_rot_std,
            rpe_rot_min,
            rpe_rot_max,
            rpe_all_trans_rmse: r.rpe_all_deltas.map(|a| a.trans_rmse),
            rpe_all_rot_rmse: r.rpe_all_deltas.map(|a| a.rot_rmse),
            matched_fraction: r.coverage.map(|c| c.matched_fraction),
            temporal_coverage: r.coverage.map(|c| c.temporal_coverage),
            largest_gap: r.coverage.map(|c| c.largest_gap),
            coverage_flag,
            external_runtime_seconds: r.external_runtime_seconds,
            evaluation_wall_seconds: r.evaluation_wall_seconds,
        }
    }
}

/// The aggregate table as CSV text with a header row.
pub fn summary_csv(records: &[EvaluationRecord]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for r in records {
        writer
            .serialize(SummaryRow::from_record(r))
            .expect("in-memory CSV write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory CSV flush")).expect("CSV is UTF-8")
}

pub fn summary_json(records: &[EvaluationRecord]) -> String {
    let mut text = serde_json::to_string_pretty(records).expect("records serialize");
    text.push('\n');
    text
}

/// Evaluates all entries and writes every output file under `output_dir`.
pub fn run_report(
    config: &ReportConfig,
    output_dir: &Path,
    options: ReportOptions,
) -> io::Result<ReportOutcome> {
    let (records, failures): (Vec<_>, Vec<_>) = config
        .entries
        .par_iter()
        .map(|entry| evaluate_entry(config, entry, options))
        .unzip();

    let records_dir = output_dir.join("records");
    fs::create_dir_all(&records_dir)?;
    records.par_iter().try_for_each(|r| {
        let mut text = r.to_json();
        text.push('\n');
        write_atomic(&records_dir.join(record_file_name(r)), text.as_bytes())
    })?;

    write_atomic(&output_dir.join("summary.csv"), summary_csv(&records).as_bytes())?;
    write_atomic(&output_dir.join("summary.json"), summary_json(&records).as_bytes())?;
    write_atomic(&output_dir.join("benchmark.svg"), benchmark_svg(&records).as_bytes())?;

    Ok(ReportOutcome {
        records,
        failures,
        output_dir: output_dir.to_path_buf(),
    })
}
