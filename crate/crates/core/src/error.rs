use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid interval ({left}, {right}): {reason}")]
    InvalidInterval { left: f64, right: f64, reason: &'static str },

    #[error("point {point} lies within the guard radius of interval endpoint {endpoint}")]
    SingularEndpoint { point: Complex64, endpoint: f64 },

    #[error("point {0} is below the real axis")]
    BelowRealAxis(Complex64),

    #[error("point {0} lies outside the closed strip 0 <= Re <= 1")]
    OutsideStrip(Complex64),

    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(f64),

    #[error("quadrature did not converge: error estimate {estimate:e} exceeds tolerance {tol:e}")]
    QuadratureDiverged { estimate: f64, tol: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{0} violated")]
    ConstraintViolated(String),

    #[error("invalid node: {0}")]
    InvalidNode(String),

    #[error("the root node has no parent")]
    RootHasNoParent,

    #[error("node {0} depends on a level that is not finalized")]
    NotFinalized(String),

    #[error("no sign change of Im P in the bracket around node {0}")]
    NoSignChange(String),

    #[error("root for node {node} has residual {residual:e} above tolerance {tol:e}")]
    ToleranceNotReached { node: String, residual: f64, tol: f64 },

    #[error("collision search failed: {0}")]
    NoCollision(String),

    #[error("seed constant {name} is not positive ({value})")]
    NonPositiveConstant { name: &'static str, value: f64 },

    #[error("seed estimate did not converge: {0}")]
    EstimateDiverged(String),

    #[error("seed has no normalized zero pair")]
    MissingZeroPair,

    #[error("integrand value {value} left the annulus [{min}, {max}]")]
    AnnulusViolation { value: f64, min: f64, max: f64 },

    #[error("image loop passes within {distance:e} of the target (budget {budget:e})")]
    BoundaryTooClose { distance: f64, budget: f64 },

    #[error("winding number failed to stabilize: {0}")]
    WindingUnstable(String),

    #[error("self-map left the upper half-plane at {0}")]
    LeftHalfPlane(Complex64),

    #[error("anchor {0} lies on the boundary of the current set")]
    AnchorOnBoundary(f64),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
