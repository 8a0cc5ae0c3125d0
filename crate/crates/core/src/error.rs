use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("matrix is not primitive (gcd of entries is {0})")]
    NotPrimitive(String),

    #[error("budget exceeded for {what}: estimated {estimated} > limit {limit}")]
    BudgetExceeded {
        what: &'static str,
        estimated: u128,
        limit: u128,
    },

    #[error("too close to a pole: |1 - c(p) p^-s| = {modulus:e} at p = {p}")]
    PoleProximity { p: u64, modulus: f64 },

    #[error("quadrature did not converge: estimated error {error:e} after {cells} cells")]
    NonConvergence { error: f64, cells: usize },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("grid resolution {step} is coarser than {required}")]
    Resolution { step: f64, required: f64 },

    #[error("cumulative samples end at {available}, need {required}")]
    InsufficientRange { available: f64, required: f64 },
}

impl Error {
    /// `true` for errors caused by a resource guard rather than bad input.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}
