use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("distributions have different range counts ({left} vs {right})")]
    RangeCountMismatch { left: usize, right: usize },

    /// `p` puts mass on a range where the reference distribution (or code) has none.
    #[error("absolute continuity violated at range {range}: divergence is infinite")]
    AbsoluteContinuity { range: u32 },

    #[error("range {target} has no sequence element within radius {radius}")]
    NotEncodable { target: u32, radius: u32 },

    #[error("malformed codeword: step {step} outside sequence of length {len}")]
    MalformedCodeword { step: usize, len: usize },

    #[error("range {range} is never solved within radius {radius}")]
    Coverage { range: u32, radius: u32 },

    #[error("exhaustive check infeasible: n = {n} exceeds limit {limit}")]
    Infeasible { n: usize, limit: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
