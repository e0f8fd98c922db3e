use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Operand shapes disagree.
    Dimension {
        op: &'static str,
        expected: usize,
        found: usize,
    },
    /// A precondition on a scalar argument does not hold.
    InvalidArgument(&'static str),
    /// A training loss became NaN or infinite.
    NonFinite { what: &'static str, step: usize },
    /// The input carries no information for the requested statistic.
    Degenerate(&'static str),
    /// A forward cache was used after the network changed.
    StaleCache,
}

impl Error {
    pub(crate) fn dim(op: &'static str, expected: usize, found: usize) -> Self {
        Error::Dimension {
            op,
            expected,
            found,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dimension {
                op,
                expected,
                found,
            } => write!(f, "{op}: dimension mismatch (expected {expected}, found {found})"),
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::NonFinite { what, step } => {
                write!(f, "non-finite {what} at step {step}")
            }
            Error::Degenerate(msg) => write!(f, "degenerate input: {msg}"),
            Error::StaleCache => f.write_str("forward cache does not match the current network"),
        }
    }
}

impl core::error::Error for Error {}
