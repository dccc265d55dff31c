use thiserror::Error;

/// Errors raised across the laboratory. Variants are grouped by the CLI exit
/// code they map to (see [`SpcError::exit_code`]).
#[derive(Debug, Error)]
pub enum SpcError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("model error: {0}")]
    Model(String),
    #[error("no bound state in bracket ({lo}, {hi})")]
    NoBoundState { lo: f64, hi: f64 },
    #[error("{count} eigenvalues in bracket ({lo}, {hi}); expected at most one")]
    MultipleBoundStates { count: usize, lo: f64, hi: f64 },
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("window error: {0}")]
    Window(String),
    #[error("fit quality error: residual {residual:.4} exceeds {limit}; {diagnostics}")]
    FitQuality {
        residual: f64,
        limit: f64,
        diagnostics: String,
    },
    #[error("undefined input: {0}")]
    UndefinedInput(String),
    #[error("undercritical or run too short: survival never drops to 1/2")]
    NoCrossing,
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("study error: {0}")]
    Study(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl SpcError {
    /// Process exit code used by the `spc` binary.
    pub fn exit_code(&self) -> i32 {
        match self {
            SpcError::Config(_) | SpcError::Usage(_) | SpcError::Io { .. } => 2,
            SpcError::Study(_) => 4,
            _ => 3,
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        SpcError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, SpcError>;
