use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the simulator, the metrics and the tooling around them.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter set violates a model invariant.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// The network produced no switch-on event within the simulation budget.
    #[error("stalled network: {0}")]
    Stalled(String),

    /// A spike train is too short for the requested analysis.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Vector lengths disagree (inputs, weights, features).
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    /// An input encoding produced a non-positive supply current.
    #[error("encoding domain error: channel {channel} yields {current} A")]
    EncodingDomain { channel: usize, current: f64 },

    /// The brute-force oracle refuses inputs above its size cap.
    #[error("oracle size cap exceeded: {0} spikes (cap {1})")]
    OracleCap(usize, usize),

    /// Malformed file contents.
    #[error("parse error{}: {msg}", .line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse { line: Option<usize>, msg: String },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParams(msg.into())
    }

    pub(crate) fn parse(line: Option<usize>, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    /// Stable category code, used as the process exit status by the CLI
    /// (which reserves 1 for internal errors and 2 for usage errors).
    pub fn category_code(&self) -> i32 {
        match self {
            Error::Parse { .. } => 3,
            Error::InvalidParams(_) | Error::ArityMismatch { .. } | Error::EncodingDomain { .. } => 4,
            Error::Stalled(_) => 5,
            Error::InsufficientData(_) | Error::OracleCap(..) => 6,
            Error::Io(_) => 7,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
