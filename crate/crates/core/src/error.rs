use alloc::string::String;

/// Errors produced by the evaluation core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("quaternion norm {norm:e} is below the rejection threshold")]
    DegenerateQuaternion { norm: f64 },

    #[error("non-finite value in {what}")]
    NonFinite { what: &'static str },

    #[error("invalid timestamp {0}: timestamps must be finite and non-negative")]
    InvalidTimestamp(f64),

    #[error("trajectory contains no poses")]
    EmptyTrajectory,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "no matching timestamps: ground truth spans [{:.6}, {:.6}] s, estimate spans [{:.6}, {:.6}] s",
        gt_span.0, gt_span.1, est_span.0, est_span.1
    )]
    NoOverlap {
        gt_span: (f64, f64),
        est_span: (f64, f64),
    },

    #[error("time {t:.6} s is outside the trajectory range [{start:.6}, {end:.6}] s")]
    OutOfRange { t: f64, start: f64, end: f64 },

    #[error("need at least {needed} pose pairs, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(&'static str),

    #[error("no relative pose couples for delta {delta} {unit} over a {span:.6} s trajectory of {pairs} pairs")]
    EmptyWindow {
        delta: f64,
        unit: &'static str,
        span: f64,
        pairs: usize,
    },

    #[error("cannot summarize an empty sample set")]
    EmptySamples,

    #[error("degradation removed every pose")]
    EmptyResult,
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
