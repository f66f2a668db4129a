use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error(transparent)]
    Core(#[from] conelab_core::Error),
    #[error("unknown check id `{0}`")]
    UnknownCheck(String),
    #[error("check `{check}` needs an even dimension, got d = {d}")]
    ParityMismatch { check: String, d: usize },
    #[error("check `{check}` needs d >= {min}, got d = {d}")]
    DimensionMismatch { check: String, d: usize, min: usize },
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl LabError {
    /// Errors caused by bad input rather than a failed computation.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            LabError::UnknownCheck(_)
                | LabError::ParityMismatch { .. }
                | LabError::DimensionMismatch { .. }
                | LabError::Config(_)
        ) || matches!(
            self,
            LabError::Core(
                conelab_core::Error::NonPrime(_)
                    | conelab_core::Error::EvenCharacteristic
                    | conelab_core::Error::DegreeZero
                    | conelab_core::Error::NotPrimePower(_)
                    | conelab_core::Error::DimensionTooSmall { .. }
                    | conelab_core::Error::BadParams(_)
            )
        )
    }
}

pub type LabResult<T> = Result<T, LabError>;
