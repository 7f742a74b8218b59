use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),

    /// Parameters, keys or graph arguments that violate a documented invariant.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Message or tag data that cannot be processed under valid parameters.
    #[error("invalid input: {0}")]
    Input(String),

    #[error("entropy source failed: {0}")]
    Entropy(String),
}

impl Error {
    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}
