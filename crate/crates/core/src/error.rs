use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate extremum surface: {0}")]
    DegenerateSurface(String),

    #[error("wave vector {k:?} lies outside the resolved band |k_i| <= {band}")]
    OutOfBand { k: Vec<f64>, band: f64 },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("band frame undefined at p = {0:?}: the lower-band eigenvector has no continuous gauge there")]
    GaugeSingularity(Vec<f64>),

    #[error("eigensolver did not converge after {iterations} iterations (worst residual {worst_residual:.3e}, tolerance {tolerance:.3e})")]
    NotConverged {
        iterations: usize,
        worst_residual: f64,
        tolerance: f64,
        residuals: Vec<f64>,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
