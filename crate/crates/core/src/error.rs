use thiserror::Error;

/// Failures raised by the model closures and the time integrators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} requires a positive specific volume, got {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("misuse: {0}")]
    Misuse(String),

    #[error("specific volume {value:e} at node {node} fell below the floor {floor:e} (t = {t})")]
    Positivity {
        node: usize,
        value: f64,
        floor: f64,
        t: f64,
    },

    #[error("non-finite value in field {field} at node {node} (t = {t})")]
    NonFinite {
        field: &'static str,
        node: usize,
        t: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
