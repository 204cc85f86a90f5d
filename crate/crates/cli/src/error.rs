//! Error taxonomy mapped onto process exit codes.
//!
//! * `1` — usage errors (bad flags, malformed ranges); also produced by the
//!   argument parser itself.
//! * `2` — data problems: missing or unreadable files, malformed CSV/JSON,
//!   unknown recording ids, datasets the pipeline cannot evaluate.
//! * `3` — model/config mismatches: a checkpoint whose frame spec or tensor
//!   shapes disagree with what was requested.

use imu_movie::data::DataError;
use imu_movie::eval::EvalError;
use imu_movie::localize::LocalizeError;
use imu_movie::model::{CheckpointError, ModelError};
use imu_movie::render::RenderError;
use imu_movie::synth::SynthError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Model(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Model(_) => 3,
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        CliError::Data(msg.into())
    }

    pub fn model(msg: impl Into<String>) -> Self {
        CliError::Model(msg.into())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<SynthError> for CliError {
    fn from(e: SynthError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<RenderError> for CliError {
    fn from(e: RenderError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<LocalizeError> for CliError {
    fn from(e: LocalizeError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<CheckpointError> for CliError {
    fn from(e: CheckpointError) -> Self {
        match e {
            // A checkpoint that parses but doesn't fit the architecture is a
            // model mismatch; unreadable or truncated files are data errors.
            CheckpointError::Format(msg) if msg.contains("shape") || msg.contains("tensor") => {
                CliError::Model(msg)
            }
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::InvalidOptions(msg) => CliError::Usage(msg),
            other => CliError::Data(other.to_string()),
        }
    }
}
