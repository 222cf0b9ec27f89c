use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::Pose;

/// What [`Trajectory::new`] had to repair in its input.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Normalization {
    /// Input was not in timestamp order and has been sorted.
    pub reordered: bool,
    /// Poses dropped because an earlier pose had the same timestamp.
    pub duplicates_dropped: usize,
}

impl Normalization {
    pub fn is_clean(&self) -> bool {
        !self.reordered && self.duplicates_dropped == 0
    }
}

/// Non-empty pose sequence with strictly increasing timestamps.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    poses: Vec<Pose>,
    label: String,
}

impl Trajectory {
    /// Sorts by timestamp and drops later duplicates of a timestamp, keeping
    /// the first occurrence in input order.
    pub fn new(label: impl Into<String>, mut poses: Vec<Pose>) -> Result<(Self, Normalization)> {
        if poses.is_empty() {
            return Err(Error::EmptyTrajectory);
        }
        let mut report = Normalization::default();
        if poses.windows(2).any(|w| w[1].timestamp() < w[0].timestamp()) {
            report.reordered = true;
            // stable, so the first occurrence of a repeated stamp stays first
            poses.sort_by(|a, b| a.timestamp().total_cmp(&b.timestamp()));
        }
        let before = poses.len();
        poses.dedup_by(|later, earlier| later.timestamp() == earlier.timestamp());
        report.duplicates_dropped = before - poses.len();
        Ok((
            Self {
                poses,
                label: label.into(),
            },
            report,
        ))
    }

    /// Like [`Trajectory::new`] but fails unless the input is already clean.
    pub fn from_sorted(label: impl Into<String>, poses: Vec<Pose>) -> Result<Self> {
        if poses.windows(2).any(|w| w[1].timestamp() <= w[0].timestamp()) {
            return Err(Error::InvalidParameter(
                "timestamps must be strictly increasing".into(),
            ));
        }
        Self::new(label, poses).map(|(t, _)| t)
    }

    pub fn poses(&self) -> &[Pose] {
        &self.poses
    }

    pub fn into_poses(self) -> Vec<Pose> {
        self.poses
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = label.into();
    }

    pub fn len(&self) -> usize {
        self.poses.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.poses.is_empty()
    }

    pub fn first(&self) -> &Pose {
        &self.poses[0]
    }

    pub fn last(&self) -> &Pose {
        &self.poses[self.poses.len() - 1]
    }

    /// `(first, last)` timestamps.
    pub fn time_range(&self) -> (f64, f64) {
        (self.first().timestamp(), self.last().timestamp())
    }

    pub fn duration(&self) -> f64 {
        let (a, b) = self.time_range();
        b - a
    }

    pub fn timestamps(&self) -> impl Iterator<Item = f64> + '_ {
        self.poses.iter().map(Pose::timestamp)
    }
}
