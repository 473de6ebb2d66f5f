use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Thoma parameters: {0}")]
    InvalidParams(String),

    #[error("invalid linear order: {0}")]
    InvalidOrder(String),

    #[error("invalid tableau: {0}")]
    InvalidTableau(String),

    #[error("{what} size {got} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        got: usize,
        cap: usize,
    },

    #[error("target set is not an interval of the ordered alphabet: {0}")]
    NotAnInterval(String),

    #[error("strict monotonicity fails: {0}")]
    Monotonicity(String),

    #[error("finite-alphabet reduction failed: {0}")]
    Reduction(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
