use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("distribution has no atoms")]
    Empty,
    #[error("negative mass {value} at index {index}")]
    NegativeMass { index: usize, value: f64 },
    #[error("non-finite mass at index {index}")]
    NonFinite { index: usize },
    #[error("masses sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },
    #[error("masses sum to zero, cannot normalize")]
    ZeroSum,
    #[error("sample size must be at least 1")]
    InvalidSampleSize,
    #[error("at least 2 trials required, got {0}")]
    InvalidTrials(u64),
    #[error("exact variance needs O(m^2) work; {atoms} atoms exceeds the limit of {limit}")]
    TooLarge { atoms: usize, limit: usize },
    #[error("alphabet ratio must be positive, got {0}")]
    InvalidRatio(f64),
    #[error("alphabet size must be at least 2, got {0}")]
    InvalidAlphabet(u64),
    #[error("root not bracketed: f({lo}) * f({hi}) >= 0")]
    NoBracket { lo: f64, hi: f64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    /// Stable upper-case identifier, printed by the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Empty => "EMPTY",
            Error::NegativeMass { .. } => "NEGATIVE_MASS",
            Error::NonFinite { .. } => "NON_FINITE",
            Error::NotNormalized { .. } => "NOT_NORMALIZED",
            Error::ZeroSum => "ZERO_SUM",
            Error::InvalidSampleSize => "INVALID_N",
            Error::InvalidTrials(_) => "INVALID_TRIALS",
            Error::TooLarge { .. } => "TOO_LARGE",
            Error::InvalidRatio(_) => "INVALID_B",
            Error::InvalidAlphabet(_) => "INVALID_ALPHABET",
            Error::NoBracket { .. } => "NO_BRACKET",
            Error::Parse { .. } => "PARSE",
        }
    }
}
