use thiserror::Error;

/// Errors produced by the sizing library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid trade distribution: {0}")]
    InvalidDistribution(String),

    #[error("fraction {0} outside the domain [0, 1)")]
    FractionDomain(f64),

    #[error("{0}")]
    Domain(String),

    #[error("invalid objective: {0}")]
    InvalidObjective(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("enumeration of {required} items exceeds the cap of {cap}; use the dynamic-programming or Monte Carlo route")]
    CapExceeded { required: u128, cap: u64 },

    #[error("trades admit no integer scaling: {0}")]
    NoIntegerScaling(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by the enumeration cap or an unusable method,
    /// as opposed to malformed input.
    pub fn is_method_error(&self) -> bool {
        matches!(self, Error::CapExceeded { .. } | Error::NoIntegerScaling(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
