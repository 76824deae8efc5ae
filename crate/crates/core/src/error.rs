use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A seed violates a generator's state invariant (zero register, degenerate orbit, ...).
    #[error("invalid seed: {0}")]
    InvalidSeed(String),

    /// An argument is outside its documented domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A grid or combination-array configuration is inconsistent.
    #[error("configuration error: {0}")]
    Config(String),

    /// The requested problem size exceeds an explicit resource cap.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// A requested witness or certificate does not exist.
    #[error("certificate error: {0}")]
    Certificate(String),

    /// Modular arithmetic failure (non-invertible element, modulus too small, ...).
    #[error("arithmetic error: {0}")]
    Arithmetic(String),

    /// Malformed key, ciphertext, function-table or stream file.
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
