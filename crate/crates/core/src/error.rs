use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A size or range limit was exceeded.
    #[error("capacity error: {0}")]
    Capacity(String),
    /// A fraction a/q with gcd(a, q) > 1.
    #[error("{a}/{q} is not reduced")]
    NotReduced { a: i64, q: u64 },
    /// A finite identity failed its residual check.
    #[error("consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
