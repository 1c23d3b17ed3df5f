use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid fixed-point format: {0}")]
    InvalidFormat(String),

    #[error("dimension mismatch for {what}: expected {expected}, got {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("coordinate {index}: value {value} is not representable in the fixed-point format")]
    Unrepresentable { index: usize, value: f64 },

    #[error("{what} needs {required} evaluations, above the limit of {limit}")]
    TooLarge {
        what: &'static str,
        required: u128,
        limit: u128,
    },

    #[error("every grid point failed ({failures} attempted)")]
    AllGridPointsFailed { failures: usize },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn check_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                what,
                expected,
                found,
            })
        }
    }
}
