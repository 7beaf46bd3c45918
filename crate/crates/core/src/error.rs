use thiserror::Error;

/// Errors for operations with explicit contracts.
///
/// Most set-algebra operations are total and never return these; the error
/// paths exist where a caller can hand in data that violates a documented
/// precondition (unsorted build input, foreign chunking parameter, malformed
/// chunk bytes, a second writer).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("corrupt chunk: {0}")]
    CorruptChunk(String),

    /// Two c-trees built with different chunking parameters were combined.
    #[error("chunking parameter mismatch: {0} vs {1}")]
    ChunkParamMismatch(u64, u64),

    #[error("vertex {0} not present")]
    VertexNotFound(u64),

    /// A second writer tried to take the writer token.
    #[error("writer token already held")]
    WriterHeld,
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
