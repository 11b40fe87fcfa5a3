use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (relative deviation {deviation:e})")]
    NonHermitianInput { deviation: f64 },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not positive definite (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("vector must be nonzero")]
    ZeroVector,

    #[error("signature J_{{p,q}} needs p + q >= 1")]
    EmptySignature,

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("point of norm {norm} is outside the ball (margin 1e-6)")]
    OutsideBall { norm: f64 },

    #[error("evaluation point leaves the domain (norm {norm})")]
    DomainEscape { norm: f64 },

    #[error("embedding maps a point to norm {norm}, outside the ball")]
    EmbeddingEscapesBall { norm: f64 },

    #[error("delta vanishes at a sample point")]
    DeltaVanishes,

    #[error("empty input")]
    EmptyInput,

    #[error("linear-fractional denominator is singular (condition number {condition:e})")]
    SingularDenominator { condition: f64 },

    #[error("datum is not strictly solvable: xi*xi - eta*eta = {margin:e}")]
    NotStrictlySolvable { margin: f64 },

    #[error("interpolation problem is not solvable (step {step}, margin {margin:e})")]
    NotSolvable { step: usize, margin: f64 },

    #[error("parameter is not contractive on probe points (norm {norm})")]
    ParameterNotContractive { norm: f64 },

    #[error("hypothesis violated: interpolation residual {residual:e}")]
    HypothesisViolated { residual: f64 },

    #[error("denominator 1 - s(z) conj(s(a)) vanishes")]
    DenominatorVanishes,

    #[error("malformed document at {location}: {message}")]
    MalformedDocument { location: String, message: String },
}
