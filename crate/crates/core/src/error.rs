use thiserror::Error;

use crate::geometry::Keyedge;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("keyedge depth {depth} is not positive (object behind the camera)")]
    NonPositiveDepth { depth: f64 },

    #[error("keyedge {keyedge} has zero or negative visual height {height}")]
    ZeroHeight { keyedge: Keyedge, height: f64 },

    #[error("degenerate observation: {0}")]
    DegenerateObservation(String),

    #[error("keyedge-ratio tuple for reference {reference} carries no measurable distortion")]
    UnobservableDistortion { reference: Keyedge },

    #[error("invalid object dimensions l={l}, w={w}")]
    InvalidDims { l: f64, w: f64 },

    #[error("recovered center depth {0} is not positive")]
    NonPositiveResult(f64),

    #[error("every keyedge-ratio tuple is degenerate")]
    AllDegenerate,

    #[error("nothing to fuse")]
    EmptyInput,

    #[error("uncertainty must be positive, got {0}")]
    NonPositiveSigma(f64),

    #[error("no ground truth records")]
    NoGroundTruth,

    #[error("parse error at line {line}, field {field}: {message}")]
    Parse {
        line: usize,
        field: usize,
        message: String,
    },

    #[error("focal length {0} is not positive")]
    NonPositiveFocal(f64),

    #[error("object at line {line} is behind the camera (z = {z})")]
    BehindCamera { line: usize, z: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed JSON record at line {line}: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, field: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            field,
            message: message.into(),
        }
    }

    /// Whether the failure stems from geometry that cannot be inverted, as
    /// opposed to malformed input or I/O.
    pub fn is_numeric_degeneracy(&self) -> bool {
        matches!(
            self,
            Error::NonPositiveDepth { .. }
                | Error::ZeroHeight { .. }
                | Error::DegenerateObservation(_)
                | Error::UnobservableDistortion { .. }
                | Error::NonPositiveResult(_)
                | Error::AllDegenerate
                | Error::NonPositiveSigma(_)
                | Error::BehindCamera { .. }
        )
    }
}

/// Process exit codes used by the `keyedge` binary.
pub mod exit_code {
    pub const SUCCESS: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const PARSE: i32 = 3;
    pub const IO: i32 = 4;
    pub const NUMERIC: i32 = 5;
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Json { .. } | Error::Csv(_) | Error::NonPositiveFocal(_) => {
                exit_code::PARSE
            }
            Error::Io(_) => exit_code::IO,
            Error::Config(_) | Error::InvalidDims { .. } | Error::EmptyInput | Error::NoGroundTruth => {
                exit_code::USAGE
            }
            _ if self.is_numeric_degeneracy() => exit_code::NUMERIC,
            _ => exit_code::USAGE,
        }
    }
}
