use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not in SU(1,1): |alpha|^2 - |beta|^2 - 1 = {residual:e}")]
    NonUnitary { residual: f64 },

    #[error("point {re} + {im}i is not inside the disc guard (|z| = {modulus})")]
    BoundaryPoint { re: f64, im: f64, modulus: f64 },

    #[error("orbit enumeration passed the element cap of {cap}")]
    BudgetExceeded { cap: usize },

    #[error("orbit ball of radius {radius} is too small: {reason}")]
    InsufficientBall { radius: f64, reason: String },

    #[error("seed function is not bounded on the closed disc: {0}")]
    UnboundedSeed(String),

    #[error("quadrature refinement does not converge (successive differences {coarse:e} -> {fine:e})")]
    QuadratureDiverged { coarse: f64, fine: f64 },

    #[error("polynomial approximation reached degree {degree} with norm {achieved:e} > {target:e}")]
    TargetNotReached { degree: usize, achieved: f64, target: f64 },

    #[error("point lies on the orbit singularity (distance {distance:e})")]
    OrbitSingularity { distance: f64 },

    #[error("all basis sections vanish at the sample point")]
    DegenerateBasis,

    #[error("points are equivalent under the group (distance to orbit {distance:e})")]
    EquivalentPoints { distance: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
