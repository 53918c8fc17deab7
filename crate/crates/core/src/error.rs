use thiserror::Error;

/// Errors raised by the computational core.
///
/// Variants fall into two families that the command-line front end maps to
/// distinct exit codes: precondition violations (bad input) and guard trips
/// (input is valid but the requested computation exceeds a configured size
/// limit).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("field size {p}^{r} does not fit below 2^63")]
    FieldTooLarge { p: u64, r: u32 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("zero element has no multiplicative order or inverse")]
    ZeroElement,

    #[error("zero polynomial")]
    ZeroPolynomial,

    #[error("constant coefficient vanishes modulo {0}; the sequence is not purely periodic")]
    ZeroConstantTerm(u64),

    #[error("characteristic polynomial has a repeated root")]
    RepeatedRoot,

    #[error("degree {degree} does not divide extension degree {ext}")]
    DegreeMismatch { degree: usize, ext: u32 },

    #[error("moduli differ: {0} vs {1}")]
    ModulusMismatch(u64, u64),

    #[error("sequence is identically zero")]
    DegenerateSequence,

    #[error("guard tripped: {what} = {value} exceeds limit {limit}")]
    Guard {
        what: &'static str,
        value: u128,
        limit: u128,
    },

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
}

impl Error {
    /// True for errors caused by a size guard rather than by invalid input.
    pub fn is_guard(&self) -> bool {
        matches!(self, Error::Guard { .. } | Error::Overflow(_))
    }

    pub(crate) fn guard(what: &'static str, value: impl Into<u128>, limit: impl Into<u128>) -> Self {
        Error::Guard {
            what,
            value: value.into(),
            limit: limit.into(),
        }
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
