use thiserror::Error;

/// Errors surfaced by the geometry and statistics layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("1-D minimization failed to converge: {0}")]
    NonConvergence(String),

    #[error("fundamental-domain reduction did not terminate after {0} steps")]
    ReductionStuck(usize),

    #[error("flat trajectory hit a cone point {0} times in a row")]
    ConePointHit(usize),

    #[error("oracle box too small: shortest path touches the boundary")]
    BoxTooSmall,

    #[error("point outside the declared oracle box")]
    OutsideBox,

    #[error("exceptional direction: {0}")]
    Exceptional(String),

    #[error("periodic Z-projection: every step weight shares residue class; add a lazy step")]
    PeriodicProjection,

    #[error("random-walk limits not separated; resample with a different seed")]
    UnseparatedLimits,

    #[error("lamination approximation: {0}")]
    Lamination(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
