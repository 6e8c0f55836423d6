use core::fmt;

/// Errors raised by the arithmetic and construction layers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// A cyclotomic result would need a conductor above [`crate::cyclo::MAX_CONDUCTOR`].
    ConductorOverflow(u64),
    /// Adding exact values whose powers of `q^{1/2}` differ.
    HalfExpMismatch(i64, i64),
    InvalidConfig(&'static str),
    DivisionByZero,
    /// Effective precision fell below one digit.
    PrecisionExhausted,
    NotASquare,
    InvalidExtension(&'static str),
    NotGalois,
    NotRegular,
    Precondition(&'static str),
    /// An internal consistency check failed; carries a short description.
    Verification(&'static str),
    NonStabilization,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ConductorOverflow(m) => write!(f, "conductor {m} exceeds the configured bound"),
            Error::HalfExpMismatch(a, b) => {
                write!(f, "cannot add values with q-half-exponents {a} and {b}")
            }
            Error::InvalidConfig(s) => write!(f, "invalid configuration: {s}"),
            Error::DivisionByZero => write!(f, "division by zero"),
            Error::PrecisionExhausted => write!(f, "precision exhausted"),
            Error::NotASquare => write!(f, "not a square"),
            Error::InvalidExtension(s) => write!(f, "invalid extension: {s}"),
            Error::NotGalois => write!(f, "extension is not Galois"),
            Error::NotRegular => write!(f, "input is not regular"),
            Error::Precondition(s) => write!(f, "precondition violated: {s}"),
            Error::Verification(s) => write!(f, "verification failed: {s}"),
            Error::NonStabilization => write!(f, "Gauss sum did not stabilise within precision"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
