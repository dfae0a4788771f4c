use clonal_recur::analytics::AnalyticsError;
use clonal_recur::inference::InferenceError;
use clonal_recur::simulate::SimError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numeric(_) => 2,
        }
    }

    pub fn io(path: &std::path::Path, e: impl std::fmt::Display) -> Self {
        CliError::Config(format!("cannot write {}: {e}", path.display()))
    }
}

impl From<AnalyticsError> for CliError {
    fn from(e: AnalyticsError) -> Self {
        match e {
            AnalyticsError::NegativeY { .. } | AnalyticsError::InvalidWindow { .. } => CliError::Config(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Analytics(inner) => inner.into(),
            SimError::InvalidStopTime { .. }
            | SimError::UnsortedObservationTimes
            | SimError::InvalidMargin { .. }
            | SimError::InvalidWindow { .. }
            | SimError::ConditioningEndsEarly { .. }
            | SimError::Io(_)
            | SimError::Csv(_) => CliError::Config(e.to_string()),
        }
    }
}

impl From<InferenceError> for CliError {
    fn from(e: InferenceError) -> Self {
        match e {
            InferenceError::Simulation(inner) => inner.into(),
            InferenceError::Empty
            | InferenceError::InvalidObservation { .. }
            | InferenceError::NonPositiveCount { .. }
            | InferenceError::InvalidLevel { .. }
            | InferenceError::Csv(_) => CliError::Config(e.to_string()),
            InferenceError::Inadmissible { .. } | InferenceError::Batch { .. } | InferenceError::AllCensored { .. } => {
                CliError::Numeric(e.to_string())
            }
        }
    }
}
