use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input rejected by a constructor or a precondition check.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A document did not match its schema; `path` is a JSON path such as `$.edges[0].length`.
    #[error("schema violation at {path}: {message}")]
    Schema { path: String, message: String },

    /// Spectral data failing one or more hypotheses of the inverse problem.
    #[error("spectral data rejected: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidSpectralData(Vec<crate::spectral::Violation>),

    /// A computed quantity broke an identity that must hold for every valid input.
    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("round-trip deviation {deviation} exceeds tolerance {tolerance}")]
    Deviation { deviation: String, tolerance: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema { path: path.into(), message: message.into() }
    }

    /// Stable machine-readable reason code.
    pub fn reason_code(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid-input",
            Error::Schema { .. } => "schema",
            Error::InvalidSpectralData(_) => "invalid-spectral-data",
            Error::Invariant(_) => "invariant",
            Error::Deviation { .. } => "deviation",
            Error::Io { .. } => "io",
        }
    }

    /// Process exit status: 1 for rejected input, 2 for internal invariant failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Invariant(_) | Error::Deviation { .. } => 2,
            _ => 1,
        }
    }
}
