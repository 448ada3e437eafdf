use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("input: {0}")]
    Input(String),

    #[error(transparent)]
    Core(#[from] hcns_core::Error),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl HarnessError {
    /// Process exit code: 3 for a numerical breakdown, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Core(hcns_core::Error::Positivity { .. })
            | HarnessError::Core(hcns_core::Error::NonFinite { .. }) => 3,
            _ => 2,
        }
    }
}
