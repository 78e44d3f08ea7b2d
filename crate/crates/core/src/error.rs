use thiserror::Error;

/// Text-format parse failure with the byte offset where it was detected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at position {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(position: usize, message: impl Into<String>) -> Self {
        Self {
            position,
            message: message.into(),
        }
    }

    /// Shifts the reported position by `offset`, for errors raised inside a
    /// field of a larger record.
    pub fn offset(mut self, offset: usize) -> Self {
        self.position += offset;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("surface needs at least 5 points on the conic, got a = {0}")]
    TooFewPoints(u32),
    #[error("class has {found} exceptional coordinates, surface with a = {a} needs {expected}")]
    RankMismatch { a: u32, expected: usize, found: usize },
    #[error("classes live in lattices of different rank ({0} vs {1})")]
    Incompatible(usize, usize),
}
