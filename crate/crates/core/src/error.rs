use thiserror::Error;

/// Everything that can go wrong in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("{what} {value} out of range for n={n}")]
    OutOfRange { what: &'static str, value: usize, n: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("structure error: {0}")]
    Structure(String),

    #[error("n={n} exceeds the configured bound {bound}")]
    Resource { n: usize, bound: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("rewriting did not terminate within {budget} steps")]
    NonTermination {
        budget: usize,
        trace: Box<crate::rewriter::RewriteTrace>,
    },

    #[error("left-hand side does not occur at position {position}")]
    Application { position: usize },

    #[error("internal defect: {0}")]
    Defect(String),
}

pub type Result<T> = std::result::Result<T, Error>;
