use thiserror::Error;

/// Errors reported by the solver and its verification harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid medium: {0}")]
    InvalidMedium(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("scene validation failed: {}", .0.join("; "))]
    SceneValidation(Vec<String>),

    #[error("quadrature order {order} too low (minimum {min})")]
    ResolutionTooLow { order: usize, min: usize },

    #[error("system is singular or ill-conditioned (condition estimate {condition:e})")]
    SingularSystem { condition: f64 },

    #[error("non-finite entries in the {0} block")]
    NonFinite(String),

    #[error("evaluation point at distance {distance:e} from {surface}, minimum is {required:e}")]
    NearSurface {
        surface: &'static str,
        distance: f64,
        required: f64,
    },

    #[error("evaluation point lies in the wrong region: {0}")]
    WrongRegion(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid incident field: {0}")]
    InvalidIncident(String),

    #[error("analytic oracle unavailable: {0}")]
    OracleUnsupported(String),

    #[error("series truncation too low: {0}")]
    Truncation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
