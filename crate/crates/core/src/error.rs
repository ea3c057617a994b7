use std::path::PathBuf;

/// Errors raised across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An input lies outside the domain where a quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
    #[error(
        "quadrature did not converge: best estimate {estimate} with error {error_estimate} \
         after {subdivisions} subdivisions"
    )]
    Convergence {
        estimate: f64,
        error_estimate: f64,
        subdivisions: usize,
    },

    /// A computed probability left [0, 1] by more than rounding noise.
    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("TLE parse error at line {line}: {kind}")]
    Tle { line: usize, kind: TleErrorKind },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// What went wrong with a single TLE group.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TleErrorKind {
    #[error("expected 69 characters, found {0}")]
    LineLength(usize),
    #[error("expected line number {expected}")]
    LineNumber { expected: char },
    #[error("checksum mismatch: computed {computed}, stated {stated}")]
    Checksum { computed: u8, stated: u8 },
    #[error("catalog numbers of line 1 and line 2 differ")]
    CatalogMismatch,
    #[error("invalid field `{0}`")]
    Field(&'static str),
    #[error("group ends before line 2")]
    Truncated,
    #[error("unexpected line")]
    Unexpected,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
