//! Crate-wide error type.

/// Errors produced by parsing, validation, tracking, and evaluation.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A row of a MOT file could not be parsed.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A row of a MOT file parsed but violates a domain invariant.
    #[error("validation error at line {line}: {msg}")]
    Validation { line: usize, msg: String },

    /// A configuration value is out of range or inconsistent.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A sequence was handed to an operation expecting the other payload kind.
    #[error("sequence holds {actual}, operation needs {expected}")]
    WrongKind {
        expected: &'static str,
        actual: &'static str,
    },

    /// Tracker frames must be presented in strictly increasing order.
    #[error("frame {frame} out of order; last processed frame was {last}")]
    OutOfOrderFrame { frame: u32, last: u32 },

    /// A detection fed to the tracker violates the box or confidence invariants.
    #[error("invalid detection at frame {frame}: {msg}")]
    InvalidDetection { frame: u32, msg: String },

    /// Evaluation is undefined for an empty ground truth.
    #[error("ground truth sequence is empty")]
    EmptyGroundTruth,

    /// Ground truth and prediction cover different frame ranges.
    #[error("frame ranges differ: ground truth spans {gt} frames, prediction refers to frame {pred}")]
    FrameRangeMismatch { gt: u32, pred: u32 },

    /// A named tuning parameter does not exist or got an incompatible value.
    #[error("unknown or incompatible parameter {name:?}: {msg}")]
    Param { name: String, msg: String },

    /// Numerical failure inside a filter or solver.
    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
