//! Benchmark report configuration (TOML).
//!
//! ```toml
//! output_dir = "results"        # optional, relative to this file
//! max_diff = 0.02
//! offset = 0.0
//! interpolate_gt = false
//! align = true
//!
//! [rpe]
//! unit = "frames"               # frames | seconds | all
//! delta = 1
//! samples = 10000
//! seed = 0
//!
//! [[entry]]
//! algorithm = "slam-a"
//! sequence = "desk"
//! estimate = "est/a_desk.txt"   # relative to this file
//! groundtruth = "gt/desk.txt"
//! runtime_seconds = 42.0        # optional, measured elsewhere
//! seed = 3                      # optional, overrides rpe.seed
//! ```
//!
//! Unknown keys anywhere are rejected.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use trajeval_core::association::DEFAULT_MAX_DIFF;
use trajeval_core::metrics::DEFAULT_MAX_SAMPLES;
use trajeval_core::DeltaSpec;

use crate::evaluate::EvalParams;
use crate::record::DeltaUnit;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Syntax { path: String, message: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RpeConfig {
    #[serde(default = "default_unit")]
    pub unit: DeltaUnit,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
}

impl Default for RpeConfig {
    fn default() -> Self {
        Self {
            unit: default_unit(),
            delta: default_delta(),
            samples: default_samples(),
            seed: 0,
        }
    }
}

fn default_unit() -> DeltaUnit {
    DeltaUnit::Frames
}

fn default_delta() -> f64 {
    1.0
}

fn default_samples() -> usize {
    DEFAULT_MAX_SAMPLES
}

fn default_max_diff() -> f64 {
    DEFAULT_MAX_DIFF
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryConfig {
    pub algorithm: String,
    pub sequence: String,
    pub estimate: PathBuf,
    pub groundtruth: PathBuf,
    pub runtime_seconds: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportConfig {
    pub output_dir: Option<PathBuf>,
    #[serde(default = "default_max_diff")]
    pub max_diff: f64,
    #[serde(default)]
    pub offset: f64,
    #[serde(default)]
    pub interpolate_gt: bool,
    #[serde(default = "default_true")]
    pub align: bool,
    #[serde(default)]
    pub rpe: RpeConfig,
    #[serde(rename = "entry", default)]
    pub entries: Vec<EntryConfig>,
}

impl ReportConfig {
    pub fn from_toml(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let config: ReportConfig = toml::from_str(text).map_err(|e| ConfigError::Syntax {
            path: origin.to_string(),
            message: e.to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    /// Loads a config file; relative paths inside it are resolved against
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut config = Self::from_toml(&text, &path.display().to_string())?;
        let base = path.parent().unwrap_or(Path::new(""));
        for entry in &mut config.entries {
            entry.estimate = base.join(&entry.estimate);
            entry.groundtruth = base.join(&entry.groundtruth);
        }
        if let Some(dir) = &config.output_dir {
            config.output_dir = Some(base.join(dir));
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        if self.entries.is_empty() {
            return invalid("config has no [[entry]] tables".into());
        }
        let mut seen = HashSet::new();
        for (k, e) in self.entries.iter().enumerate() {
            if e.algorithm.trim().is_empty() || e.sequence.trim().is_empty() {
                return invalid(format!("entry {}: labels must be nonempty", k + 1));
            }
            if e.estimate == e.groundtruth {
                return invalid(format!(
                    "entry {}: estimate and groundtruth are the same path",
                    k + 1
                ));
            }
            if !seen.insert((e.algorithm.clone(), e.sequence.clone())) {
                return invalid(format!(
                    "entry {}: duplicate algorithm/sequence pair {}/{}",
                    k + 1,
                    e.algorithm,
                    e.sequence
                ));
            }
            if let Some(r) = e.runtime_seconds {
                if !(r.is_finite() && r >= 0.0) {
                    return invalid(format!("entry {}: runtime_seconds must be >= 0", k + 1));
                }
            }
        }
        self.params_for(None)
            .delta
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if !(self.max_diff.is_finite() && self.max_diff > 0.0) {
            return invalid("max_diff must be positive".into());
        }
        Ok(())
    }

    pub fn params_for(&self, entry: Option<&EntryConfig>) -> EvalParams {
        let seed = entry.and_then(|e| e.seed).unwrap_or(self.rpe.seed);
        let mut delta = match self.rpe.unit {
            DeltaUnit::Frames => DeltaSpec::frames(1),
            DeltaUnit::Seconds => DeltaSpec::seconds(1.0),
            DeltaUnit::All => DeltaSpec::all_sampled(self.rpe.samples, seed),
        };
        if self.rpe.unit != DeltaUnit::All {
            delta.delta = self.rpe.delta;
        }
        delta.max_samples = self.rpe.samples;
        delta.seed = seed;
        EvalParams {
            max_diff: self.max_diff,
            offset: self.offset,
            interpolate_gt: self.interpolate_gt,
            align: self.align,
            delta,
            ..EvalParams::default()
        }
    }
}
