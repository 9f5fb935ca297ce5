use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("operands live in different variable families")]
    SpaceMismatch,
    #[error("operands have {left} and {right} variables")]
    ArityMismatch { left: usize, right: usize },
    #[error("the zero polynomial has no leading form")]
    ZeroPolynomial,
    #[error("polynomial of degree {degree} exceeds the truncation degree {bound}")]
    DegreeBound { degree: i32, bound: usize },
    #[error("subspaces of (nvars, degree) {left:?} and {right:?} are not comparable")]
    Incomparable { left: (usize, usize), right: (usize, usize) },
    #[error("element outside the maximal ideal: the quotient would be the zero ring")]
    OutsideMaximalIdeal,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("resource guard: {what} needs dimension {needed}, limit is {limit}")]
    Resource { what: String, needed: usize, limit: usize },
    #[error("integer overflow in {0}")]
    Overflow(String),
}

impl Error {
    pub fn precondition(msg: impl Into<String>) -> Error {
        Error::Precondition(msg.into())
    }

    /// Errors caused by malformed input rather than by the mathematics.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse { .. })
    }

    pub fn is_precondition(&self) -> bool {
        !self.is_parse() && !self.is_resource()
    }

    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
