use thiserror::Error;

/// Errors raised by the library.
///
/// The variants fall into two families that the command-line front end maps
/// onto different exit codes: caller mistakes (`Dimension`, `NonFinite`,
/// `DegenerateColumn`, `Usage`, `Parse`, `Io`) and numerical failures
/// (`IterationLimit`, `Convergence`, `Membership`, `Generation`,
/// `Calibration`).
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: expected {expected}, got {got}")]
    Dimension {
        op: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("non-finite value at position {index}")]
    NonFinite { index: usize },

    #[error("column {index} has zero norm")]
    DegenerateColumn { index: usize },

    #[error("usage: {0}")]
    Usage(String),

    #[error("simplex exceeded {iterations} iterations")]
    IterationLimit { iterations: usize },

    #[error("{what} did not converge within {iterations} iterations")]
    Convergence {
        what: &'static str,
        iterations: usize,
        best: Vec<f64>,
    },

    #[error("cone membership: {0}")]
    Membership(String),

    #[error("instance generation failed: {0}")]
    Generation(String),

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("parse error in field `{field}`: {reason}")]
    Parse { field: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// An error raised inside one trial of an experiment.
    #[error("{at}: {source}")]
    Trial {
        at: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True for errors caused by malformed input rather than numerical failure.
    pub fn is_usage(&self) -> bool {
        if let Error::Trial { source, .. } = self {
            return source.is_usage();
        }
        matches!(
            self,
            Error::Dimension { .. }
                | Error::NonFinite { .. }
                | Error::DegenerateColumn { .. }
                | Error::Usage(_)
                | Error::Parse { .. }
                | Error::Io(_)
        )
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
