use std::path::PathBuf;

use crate::geometry::Point;

/// Errors raised across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("point ({}, {}) is not inside the domain", .0.x, .0.y)]
    PointOutsideDomain(Point),

    #[error("invalid obstacle: {0}")]
    InvalidObstacle(String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("total masses differ: {left} vs {right}")]
    MassMismatch { left: f64, right: f64 },

    #[error("measure has {atoms} atoms, above the cap of {cap}; subsample first")]
    SizeCap { atoms: usize, cap: usize },

    #[error("unsupported domain: {0}")]
    UnsupportedDomain(String),

    #[error("solver `{solver}` cannot handle this input: {reason}")]
    UnsupportedInput { solver: String, reason: String },

    #[error("interior region is empty: {0}")]
    EmptyRegion(String),

    #[error(
        "calibration failed at n = {n}: best mass {mass:.3e} + ci {ci:.3e} does not beat target {target:.3e}"
    )]
    CalibrationFailed {
        n: u32,
        mass: f64,
        ci: f64,
        target: f64,
    },

    #[error("unknown {kind} `{name}` (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("malformed file {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
