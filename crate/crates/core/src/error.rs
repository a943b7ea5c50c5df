use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two planes that must share a shape do not.
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    /// Sample buffer length does not equal `width * height`.
    BadLength { expected: usize, found: usize },
    /// A NaN or infinite sample at the given flat index.
    NonFinite { index: usize },
    /// The histogram carries no usable spread (e.g. a constant image).
    DegenerateHistogram,
    /// The image is smaller than an operation requires.
    TooSmall {
        min: (usize, usize),
        found: (usize, usize),
    },
    /// A parameter is outside its documented domain.
    InvalidParameter(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => write!(
                f,
                "dimension mismatch: expected {}x{}, found {}x{}",
                expected.0, expected.1, found.0, found.1
            ),
            Error::BadLength { expected, found } => {
                write!(f, "sample buffer has {found} samples, expected {expected}")
            }
            Error::NonFinite { index } => write!(f, "non-finite sample at index {index}"),
            Error::DegenerateHistogram => f.write_str("degenerate histogram"),
            Error::TooSmall { min, found } => write!(
                f,
                "image is {}x{}, at least {}x{} required",
                found.0, found.1, min.0, min.1
            ),
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
        }
    }
}

impl core::error::Error for Error {}
