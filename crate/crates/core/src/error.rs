use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what} is only supported up to {limit}")]
    Capability { what: &'static str, limit: usize },

    /// Input data that a method cannot work with, such as tied values or zero spread.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("confidence level {requested} is not attainable; the maximum attainable level is {max_attainable}")]
    Infeasible { requested: f64, max_attainable: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(alloc::format!("alpha must lie in (0, 1), got {alpha}")))
    }
}
