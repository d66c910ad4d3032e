use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{what}: need at least {required} observations, got {actual}")]
    Length {
        what: &'static str,
        required: usize,
        actual: usize,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("insufficient overlap: {overlap} common dates, need at least {required}")]
    InsufficientOverlap { overlap: usize, required: usize },
    #[error("degenerate input: {0}")]
    Degenerate(String),
}

impl Error {
    pub(crate) fn length(what: &'static str, required: usize, actual: usize) -> Self {
        Error::Length {
            what,
            required,
            actual,
        }
    }
}
