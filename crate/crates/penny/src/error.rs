//! Error type shared across the crate.

use crate::packing::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The packing has overlapping disks; carries the full validation report.
    #[error("invalid packing: {} overlapping pair(s), min distance {}", .0.violations.len(), .0.min_distance)]
    InvalidPacking(ValidationReport),

    /// Bad argument: unknown vertex id, size mismatch, out-of-range parameter.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The planar structure contradicts itself (e.g. a face walk with an
    /// unexpected turning number). Indicates a bug or a corrupted input.
    #[error("geometry inconsistency: {0}")]
    GeometryInconsistency(String),

    /// An iterative solver did not reach the requested tolerance.
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    /// Random resampling hit its retry budget without an admissible sample.
    #[error("retry budget exhausted after {attempts} attempts: {reason}")]
    RetryBudgetExhausted { attempts: usize, reason: String },

    /// A query point lies outside the triangulated region.
    #[error("point ({0}, {1}) is outside the triangulated region")]
    OutsideMesh(f64, f64),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonConvergence { .. } => 2,
            Error::Io(_) | Error::Json(_) => 3,
            _ => 1,
        }
    }
}
