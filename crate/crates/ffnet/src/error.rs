use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("leading coefficient is zero")]
    DegenerateDegree,
    #[error("mu must be positive (got {0})")]
    InvalidMu(f64),
    #[error("lambda must be positive (got {0})")]
    InvalidLambda(f64),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("state norm exceeded blow-up threshold at t = {t}")]
    Blowup { t: f64 },
    #[error("internal numeric error: {0}")]
    Internal(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
