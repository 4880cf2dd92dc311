use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The quantity is singular or undefined at the requested radius.
    #[error("{quantity} is undefined at rho = {rho}")]
    Domain { quantity: &'static str, rho: f64 },

    #[error("convergence failure: {0}")]
    Convergence(String),

    #[error("divergent integral: {0}")]
    Divergence(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn convergence(msg: impl Into<String>) -> Self {
        Error::Convergence(msg.into())
    }
}
