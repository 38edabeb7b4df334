use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension must be at least 1")]
    EmptyDimension,

    #[error("matrix is singular (pivot {pivot:e} below threshold {threshold:e})")]
    Singular { pivot: f64, threshold: f64 },

    #[error("derivative-valued operator is not symmetric (asymmetry {0:e})")]
    Asymmetric(f64),

    #[error("index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("point lies on the polar hyperplane of the Moebius map (|l0| = {0:e})")]
    PoleAtPoint(f64),

    #[error("holomorphic derivative is singular at the point: {0}")]
    SingularDerivative(String),

    #[error("I - conj(w) w is numerically singular (|det| / scale = {0:e})")]
    DegenerateDilatation(f64),

    #[error("I + A w is singular; the twisted holomorphic part has no invertible derivative")]
    SingularTwistedDerivative,

    #[error("contract violated: {0}")]
    ContractViolation(String),

    #[error("matrix is not unitary (|A A* - I| = {0:e})")]
    NotUnitary(f64),

    #[error("jet points do not match (distance {0:e})")]
    PointMismatch(f64),

    #[error("rejection sampling exhausted after {0} attempts")]
    RejectionExhausted(usize),

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("invalid map: {0}")]
    InvalidMap(String),
}

impl Error {
    /// True for failures of a numerical contract, as opposed to malformed input.
    pub fn is_numerical(&self) -> bool {
        !matches!(
            self,
            Error::InvalidMap(_) | Error::UnknownFixture(_) | Error::EmptyDimension
        )
    }
}
