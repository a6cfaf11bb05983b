use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid construction parameter (table limit, segment size, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Input outside the range a table or algorithm supports.
    #[error("range error: {0}")]
    Range(String),

    /// An argument violates a domain precondition (not prime, not squarefree, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A 64-bit intermediate would overflow.
    #[error("overflow in {0}")]
    Overflow(&'static str),

    /// Search-space guard tripped before an intractable enumeration.
    #[error("complexity guard: {0}")]
    ComplexityGuard(String),

    /// A checkpoint series file is unreadable: bad header, bad version, or
    /// a truncated/garbled record.
    #[error("corrupt series file: {0}")]
    SeriesCorrupt(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
