use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty generator set")]
    EmptyGenerators,

    #[error("unbounded domain: {0}")]
    UnboundedDomain(String),

    #[error("perturbation too large: conjugate is identically +inf")]
    PerturbationTooLarge,

    #[error("recession estimate diverges in direction {direction:?}")]
    RecessionDiverges { direction: Vec<f64> },

    #[error("domain collapsed")]
    DomainCollapsed,

    #[error("lift height T = {t_lift} is too small (floors disagree by {gap:.3e}); use a larger T")]
    LiftTooSmall { t_lift: f64, gap: f64 },

    #[error("singular boundary configuration: origin lies on the domain boundary")]
    SingularBoundary,

    #[error("singular weight requires the origin to project into the interior of the body")]
    SingularityHypothesis,

    #[error("non-integrable configuration: {0}")]
    NonIntegrable(String),

    #[error("degenerate body: {0}")]
    DegenerateBody(String),

    #[error("extended-real arithmetic: (+inf) - (+inf) is undefined")]
    InfMinusInf,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported on this track: {0}")]
    Unsupported(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("unknown scenario: {0}")]
    UnknownScenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
