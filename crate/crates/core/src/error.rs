use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum BellError {
    #[error("unsupported size: {0}")]
    UnsupportedSize(String),

    #[error("spectrum does not reconstruct a sign-valued function (assignment {assignment})")]
    NotSignValued { assignment: usize },

    #[error("sign function is not admissible: local product monomial {monomial:#b} has coefficient {coefficient}")]
    NotAdmissible { monomial: usize, coefficient: i64 },

    #[error("no vertex attains the bound {bound}")]
    BoundNotAttained { bound: i64 },

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for BellError {
    fn from(e: std::io::Error) -> Self {
        BellError::Io(e.to_string())
    }
}

pub type Result<T, E = BellError> = std::result::Result<T, E>;
