use std::fmt;

/// Process exit status for each failure class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    Usage = 1,
    Data = 2,
    Internal = 3,
}

#[derive(Debug)]
pub struct Failure {
    pub kind: ExitKind,
    pub message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Failure {}

pub type CliResult<T> = Result<T, Failure>;

pub fn usage(message: impl Into<String>) -> Failure {
    Failure {
        kind: ExitKind::Usage,
        message: message.into(),
    }
}

pub fn data(message: impl Into<String>) -> Failure {
    Failure {
        kind: ExitKind::Data,
        message: message.into(),
    }
}

pub fn internal(message: impl Into<String>) -> Failure {
    Failure {
        kind: ExitKind::Internal,
        message: message.into(),
    }
}

impl From<qebert_core::Error> for Failure {
    fn from(e: qebert_core::Error) -> Self {
        match e {
            qebert_core::Error::InvalidConfig(_) => usage(e.to_string()),
            qebert_core::Error::DimensionMismatch { .. } => internal(e.to_string()),
            _ => data(e.to_string()),
        }
    }
}
