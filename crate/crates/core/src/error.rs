use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: {what} ({left} vs {right})")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("need at least {needed} values, got {got}")]
    TooFewValues { needed: usize, got: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid data set: {0}")]
    InvalidData(String),

    #[error("invalid fold partition: {0}")]
    InvalidPartition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("halton sequence supports at most {max} dimensions, requested {requested}")]
    TooManyDimensions { requested: usize, max: usize },

    #[error("importance density vanishes at a drawn point (sample {index})")]
    ZeroProposalDensity { index: usize },

    #[error("least-squares fit failed: {0}")]
    Fit(String),

    #[error("fold {fold}: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid configuration:\n  - {}", .0.join("\n  - "))]
    Config(Vec<String>),

    #[error("unknown preset `{name}` (valid presets: {})", .valid.join(", "))]
    UnknownPreset {
        name: String,
        valid: Vec<&'static str>,
    },

    #[error("trial {trial} (n = {n}, stream {stream:#x}) failed: {source}")]
    Trial {
        trial: usize,
        n: usize,
        stream: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors caused by a bad experiment description rather than by
    /// a failure while running it.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::UnknownPreset { .. } | Error::Parse(_)
        )
    }
}
