//! Trajectory evaluation primitives for visual SLAM and odometry.
//!
//! This crate holds the numerical core: SE(3) pose algebra, timestamp
//! association, closed-form rigid alignment, absolute trajectory error (ATE),
//! relative pose error (RPE), coverage of the ground truth by an estimate, and
//! a seeded synthetic trajectory generator. It is `no_std` and only needs
//! `alloc`; file formats and the command line live in the `trajeval` crate.
//!
//! Quaternions use the TUM component order `(qx, qy, qz, qw)` everywhere.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod alignment;
pub mod association;
mod error;
pub mod geometry;
pub mod metrics;
pub mod stats;
pub mod synth;
pub mod trajectory;

pub use nalgebra;

pub use alignment::{horn_align, AlignmentResult};
pub use association::{associate, associate_interpolated, interpolate, MatchedPairs, PosePair};
pub use error::{Error, Result};
pub use geometry::{Pose, Quaternion, RigidTransform};
pub use metrics::{
    ate, coverage, rpe, rpe_all_deltas, CoverageReport, DeltaMode, DeltaSpec, ErrorKind,
    ErrorSeries, RpeSeries,
};
pub use stats::{summarize, Stats};
pub use trajectory::{Normalization, Trajectory};
