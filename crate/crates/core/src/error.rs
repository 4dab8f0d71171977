use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: classes on X_{left} and X_{right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("slope is undefined for a rank-zero character")]
    UndefinedSlope,

    #[error("character is not balanced along E_{index}: coefficient {coefficient} outside (-r, 0]")]
    NotBalanced { index: usize, coefficient: String },

    #[error("expected an integral class: {0}")]
    NotIntegral(String),

    #[error("rank {found} is below the required minimum {required}")]
    RankTooSmall { required: i64, found: String },

    #[error("negative discriminant {0}")]
    NegativeDiscriminant(String),

    #[error("slope difference {difference} lies outside the window of half-width {half_width}")]
    OutOfWindow { difference: String, half_width: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("oracle bounds exceeded: {0}")]
    OracleBounds(String),

    #[error("invalid polarization: {0}")]
    InvalidPolarization(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("class is not nef on the Hilbert scheme")]
    NotNef,

    #[error("no resolution with nonnegative exponents exists: {0}")]
    NoResolution(String),

    #[error("internal inconsistency: {0}")]
    AlgorithmBug(String),

    #[error("atlas cache error: {0}")]
    Cache(String),
}
