use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BeamError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("polynomial degree {degree} exceeds supported maximum {max}")]
    UnsupportedDegree { degree: u32, max: u32 },

    #[error("operation not available for {mode} modes: {what}")]
    UnsupportedMode { mode: &'static str, what: &'static str },
}

pub type Result<T> = std::result::Result<T, BeamError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(BeamError::Domain(msg.into()))
}
