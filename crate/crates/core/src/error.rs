use thiserror::Error;

/// Failures raised by the bound engine, the estimator and the experiment
/// pipelines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An angle fell outside the closed interval [-pi/2, pi/2].
    #[error("{what} = {value} rad is outside [-pi/2, pi/2]")]
    AngleOutOfRange { what: &'static str, value: f64 },

    /// The array needs at least two elements.
    #[error("array needs at least 2 elements, got {0}")]
    TooFewElements(usize),

    #[error("element spacing ratio must be finite and > 0, got {0}")]
    InvalidSpacing(f64),

    #[error("noise variance must be finite and > 0, got {0}")]
    InvalidNoiseVariance(f64),

    #[error("attacker needs at least one component")]
    EmptyAttacker,

    /// A scenario on which the bounds are undefined (zero Fisher information).
    #[error("degenerate scenario: {0}")]
    Degenerate(String),

    #[error("snapshot has {got} samples, array has {expected} elements")]
    SnapshotLength { expected: usize, got: usize },

    /// Configuration problem, naming the offending dotted key.
    #[error("invalid config key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. }
            | Error::TooFewElements(_)
            | Error::InvalidSpacing(_)
            | Error::EmptyAttacker => 2,
            Error::AngleOutOfRange { .. }
            | Error::InvalidNoiseVariance(_)
            | Error::Degenerate(_)
            | Error::SnapshotLength { .. } => 3,
            Error::Io(_) => 4,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
