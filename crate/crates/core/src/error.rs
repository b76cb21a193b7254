use thiserror::Error;

/// Errors raised by the operator algebra and the entropy routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid dimension {0}")]
    InvalidDimension(usize),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (max deviation of U^dagger U from identity {0:e})")]
    NotUnitary(f64),

    #[error("trace is not one (got {0})")]
    TraceNotUnity(f64),

    #[error("eigenvalue {0:e} is below the admissible floor; not a valid state")]
    NegativeEigenvalue(f64),

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("inverse temperature must be finite (got {0})")]
    NonFiniteBeta(f64),

    #[error("inverse temperature must be positive for this operation (got {0})")]
    NonPositiveBeta(f64),

    #[error("infinite relative entropy: support of sigma is not contained in support of rho")]
    InfiniteRelativeEntropy,

    #[error("reference state rho is singular (smallest eigenvalue {0:e})")]
    SingularReference(f64),

    #[error("insertion factor diverges for a zero-probability symbol")]
    DivergentInsertionFactor,

    #[error("state is not the Gibbs state of (H, beta) (max deviation {0:e})")]
    NotGibbs(f64),

    #[error("identity check failed: {lhs} vs {rhs}")]
    IdentityViolation { lhs: f64, rhs: f64 },

    #[error("{collisions} collisions requested but the reservoir holds only {reservoir} molecules")]
    CollisionsExceedReservoir { collisions: usize, reservoir: usize },

    #[error("dense dimension {dim} exceeds cap {cap}")]
    DenseCapExceeded { dim: usize, cap: usize },

    #[error("{count} type classes exceed the enumeration budget {budget}")]
    TypeBudgetExceeded { count: f64, budget: usize },

    #[error("states do not commute (residual {0:e})")]
    NonCommuting(f64),

    #[error("at least {needed} sweep points are required, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for errors caused by a resource cap rather than by invalid input.
    pub fn is_resource_cap(&self) -> bool {
        matches!(self, Error::DenseCapExceeded { .. } | Error::TypeBudgetExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
