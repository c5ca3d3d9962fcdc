use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("x = {x} lies outside the box [-{half}, {half}]")]
    Domain { x: f64, half: f64 },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("image sum not converged after {images} images")]
    Truncation { images: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
