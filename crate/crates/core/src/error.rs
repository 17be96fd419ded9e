use thiserror::Error;

/// Errors produced by the simulators and analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid Fock dimension {0}: at least two levels are required")]
    InvalidDimension(usize),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("truncation tail {tail:e} exceeds tolerance {tol:e}")]
    Precision { tail: f64, tol: f64 },

    #[error("undefined statistic: {0}")]
    UndefinedStatistic(String),

    #[error("state is not normalized (norm deviation {0:e})")]
    Normalization(f64),

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("quadrature grid under-resolves the phase: {0}")]
    Resolution(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid rate: {0}")]
    InvalidRate(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error("background is zero; g2 normalization undefined")]
    UndefinedNormalization,

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Stable machine-readable code, used by the command-line front end.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidDimension(_) => "E_DIMENSION",
            Error::Shape(_) => "E_SHAPE",
            Error::Numerical(_) => "E_NUMERICAL",
            Error::Precision { .. } => "E_PRECISION",
            Error::UndefinedStatistic(_) => "E_STATISTIC",
            Error::Normalization(_) => "E_NORMALIZATION",
            Error::Calibration(_) => "E_CALIBRATION",
            Error::Resolution(_) => "E_RESOLUTION",
            Error::Config(_) => "E_CONFIG",
            Error::InvalidRate(_) => "E_RATE",
            Error::Format(_) => "E_FORMAT",
            Error::UndefinedNormalization => "E_NORMALIZATION",
            Error::Io(_) => "E_IO",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
