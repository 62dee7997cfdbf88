use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Input violates a documented invariant.
    Validation(String),
    /// Some week in `start..start + 4` is missing or outside the study period.
    WindowUnavailable { start: u32 },
    UnknownCity(String),
    UnknownGenre(String),
    /// Genre filtering was requested on an already normalized matrix.
    AlreadyNormalized,
    /// No lag has enough samples for a correlation.
    DyadUnavailable { leader: String, follower: String },
    /// Zero variance, so a t statistic is undefined.
    DegenerateSample,
    /// Two sample lists that must be paired have different lengths.
    LengthMismatch { left: usize, right: usize },
    /// Not enough observations for the requested statistic.
    TooFewSamples { needed: usize, got: usize },
    /// Correlation with a constant vector.
    UndefinedCorrelation,
    /// A parameter is outside its domain.
    Domain(String),
    /// Planted hierarchy contains a cycle.
    CyclicHierarchy,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Validation(msg) => write!(f, "validation error: {msg}"),
            Error::WindowUnavailable { start } => {
                write!(f, "window starting at week {start} is unavailable")
            }
            Error::UnknownCity(c) => write!(f, "unknown city `{c}`"),
            Error::UnknownGenre(g) => write!(f, "unknown genre `{g}`"),
            Error::AlreadyNormalized => f.write_str("matrix is already normalized"),
            Error::DyadUnavailable { leader, follower } => write!(
                f,
                "no lag has enough samples for {follower} following {leader}"
            ),
            Error::DegenerateSample => f.write_str("sample has zero variance"),
            Error::LengthMismatch { left, right } => {
                write!(f, "cannot pair samples of length {left} and {right}")
            }
            Error::TooFewSamples { needed, got } => {
                write!(f, "need at least {needed} samples, got {got}")
            }
            Error::UndefinedCorrelation => {
                f.write_str("correlation is undefined for a constant vector")
            }
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::CyclicHierarchy => f.write_str("planted hierarchy contains a cycle"),
        }
    }
}

impl core::error::Error for Error {}
