use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point {0} is outside the domain of the system")]
    PointOutsideDomain(String),
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("elements belong to different systems")]
    SystemMismatch,
    #[error("function does not match the system backend: {0}")]
    BackendMismatch(String),
    #[error("operation not supported on this backend: {0}")]
    Unsupported(String),
    #[error("orbit points collide: point has period {period}, but {needed} distinct points are required")]
    OrbitCollision { period: usize, needed: usize },
    #[error("subset is not invariant under the homeomorphism")]
    NotInvariant,
    #[error("point {0} is periodic, an aperiodic point is required")]
    PeriodicPoint(String),
    #[error("point {0} is aperiodic, a periodic point is required")]
    AperiodicPoint(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("exact arithmetic cannot represent {0}")]
    Inexact(String),
    #[error("tolerance not met: {0}")]
    ToleranceNotMet(String),
    #[error("format error: {0}")]
    Format(String),
}
