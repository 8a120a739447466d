use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("angular collision: vortices {i} and {j} are separated by {separation:e}")]
    AngularCollision { i: usize, j: usize, separation: f64 },

    #[error("invalid number of weak vortices: {0} (need at least {1})")]
    InvalidN(usize, usize),

    #[error("configuration is not critical: max |dV| = {0:e}")]
    NotCritical(f64),

    #[error("matrix is not symmetric: max asymmetry {0:e}")]
    NotSymmetric(f64),

    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),

    #[error("eigenvalue iteration did not converge within {0} iterations")]
    ConvergenceFailure(usize),

    #[error("block is numerically singular (condition number {0:e})")]
    SingularBlock(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("Newton iteration did not converge after {iterations} steps (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("iterate approached a collision (separation {0:e})")]
    CollisionApproach(f64),

    #[error("vortex collision: vortices {i} and {j} at distance {distance:e}")]
    VortexCollision { i: usize, j: usize, distance: f64 },

    #[error("seed is degenerate: {0} zero Hessian eigenvalues (need exactly 1)")]
    DegenerateSeed(usize),

    #[error("invalid circulation epsilon {0}: {1}")]
    InvalidEpsilon(f64, &'static str),

    #[error("insufficient family: {0}")]
    InsufficientFamily(String),

    #[error("finite-difference Jacobian unstable: step halving changed entries by {0:e}")]
    JacobianUnstable(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
