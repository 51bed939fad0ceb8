use thiserror::Error;

/// Errors raised by the grid, norm, and verification routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("length mismatch: expected {expected} samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("grid specifications do not match")]
    SpecMismatch,

    #[error("band 2^{band} exceeds the Nyquist range of the grid (|xi| < {nyquist})")]
    BandExceedsNyquist { band: i32, nyquist: f64 },

    #[error("index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    /// A parameter constraint was violated; `constraint` names it.
    #[error("invalid parameters: {constraint}")]
    InvalidParameter { constraint: String },

    #[error("empty window sampler")]
    EmptySampler,

    #[error("empty input sequence")]
    EmptySequence,

    #[error("frequency band not covered: relative energy {energy:.3e} above |xi| = {limit}")]
    BandNotCovered { energy: f64, limit: f64 },

    #[error(
        "quadrature did not converge: estimated error {error:.3e} after {intervals} intervals"
    )]
    QuadratureDiverged { error: f64, intervals: usize },

    #[error("argument {value} outside the domain of {function}")]
    Domain { function: &'static str, value: f64 },

    #[error("baseline file {0} already exists; pass --force to overwrite")]
    BaselineExists(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(constraint: impl Into<String>) -> Self {
        Error::InvalidParameter {
            constraint: constraint.into(),
        }
    }

    /// True for failures caused by the file system rather than by the inputs.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
