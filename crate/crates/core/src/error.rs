use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid surface: {0}")]
    Surface(String),
    #[error("invalid triangulation: {0}")]
    Triangulation(String),
    #[error("spec file error: {0}")]
    SpecFile(String),
    #[error("matrix identity violated: {0}")]
    Identity(String),
    #[error("lattice error: {0}")]
    Lattice(String),
    #[error("unsupported parameter: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
