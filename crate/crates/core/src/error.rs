use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("unsupported scenario: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("structural check failed: {0}")]
    Structural(String),
    #[error("ill-conditioned: {0}")]
    Conditioning(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("singular chain: {0}")]
    SingularChain(String),
    #[error("path too close to the origin at step {0}")]
    NearOrigin(usize),
    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// Short machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Degenerate(_) => "degenerate_input",
            Error::Unsupported(_) => "unsupported_scenario",
            Error::Parse(_) => "parse_error",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Structural(_) => "structural_error",
            Error::Conditioning(_) => "conditioning_error",
            Error::Numerical(_) => "numerical_failure",
            Error::SingularChain(_) => "singular_chain",
            Error::NearOrigin(_) => "near_origin",
            Error::Io(_) => "io_error",
        }
    }

    /// Configuration problems as opposed to numerical ones.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Parse(_) | Error::InvalidArgument(_) | Error::Unsupported(_) | Error::Io(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
