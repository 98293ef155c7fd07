use thiserror::Error;

use crate::model::CellId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown cell {0}")]
    UnknownCell(String),

    #[error("duplicate cell name `{0}`")]
    DuplicateName(String),

    #[error("self-coupling on cell `{0}`")]
    SelfCoupling(String),

    #[error("cell `{name}`: bias {bias} must satisfy |bias| < phi0/2 = {limit}")]
    BiasOutOfRange { name: String, bias: f64, limit: f64 },

    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("gate parameters rejected: {0}")]
    InvalidParams(String),

    #[error("lift strength {strength} out of range: {reason}")]
    StrengthOutOfRange { strength: f64, reason: String },

    #[error("cell {0:?} is clamped")]
    ClampedCell(CellId),

    #[error("assignment covers {got} cells, network has {expected}")]
    AssignmentSize { expected: usize, got: usize },

    #[error(
        "{free} free cells exceed the exact-enumeration limit of {limit}; \
         raise the limit or use annealing"
    )]
    OverLimit { free: usize, limit: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// 1-based source line for parse errors.
    pub fn line(&self) -> Option<usize> {
        match self {
            Error::Parse { line, .. } => Some(*line),
            _ => None,
        }
    }
}
