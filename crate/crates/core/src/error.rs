use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid quantum numbers: {0}")]
    InvalidQuantumNumbers(String),

    #[error("unsupported term symbol `{0}`")]
    UnsupportedTerm(String),

    #[error("radial profile does not cover the wavefunction support: {0}")]
    GridMismatch(String),

    #[error("n* = {n_star} is outside the interpolation range [{min}, {max}]")]
    OutOfBracket { n_star: f64, min: f64, max: f64 },

    #[error("field truncated at k_max = {k_max}, but rank {needed} is required")]
    Truncation { k_max: u32, needed: u32 },

    #[error("numerical nonconvergence: {0}")]
    Nonconvergence(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("energy {energy} cm^-1 is not below the threshold {threshold} cm^-1")]
    AboveThreshold { energy: f64, threshold: f64 },

    #[error("no quantum-defect model for series {0}")]
    MissingDefectModel(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("data error: {0}")]
    Data(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the CLI: 1 usage, 2 data, 3 nonconvergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Nonconvergence(_) => 3,
            Error::InsufficientData(_)
            | Error::AboveThreshold { .. }
            | Error::Data(_)
            | Error::Io(_)
            | Error::Csv(_)
            | Error::Json(_)
            | Error::GridMismatch(_)
            | Error::OutOfBracket { .. }
            | Error::MissingDefectModel(_) => 2,
            Error::InvalidQuantumNumbers(_)
            | Error::UnsupportedTerm(_)
            | Error::Truncation { .. }
            | Error::InvalidParameter(_) => 1,
        }
    }
}
