use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("characteristic 2 is not supported")]
    CharacteristicTwo,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("constant polynomial")]
    ConstantPolynomial,
    #[error("polynomial does not satisfy T^N P(1/T) = ±P(T)")]
    NotReciprocal,
    #[error("polynomial is not separable")]
    NotSeparable,
    #[error("boundary root: f(1) or f(-1) vanishes")]
    BoundaryRoot,
    #[error("budget exceeded for {what}: needs {needed}, limit {limit}")]
    Budget {
        what: String,
        needed: String,
        limit: String,
    },
    #[error("inconsistent result: {0}")]
    Inconsistent(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Error {
        Error::Invalid(msg.into())
    }

    pub fn budget(what: impl Into<String>, needed: impl ToString, limit: impl ToString) -> Error {
        Error::Budget {
            what: what.into(),
            needed: needed.to_string(),
            limit: limit.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
