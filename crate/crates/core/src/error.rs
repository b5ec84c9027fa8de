use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("singular basis")]
    SingularBasis,
    #[error("basis condition number {0:.3e} exceeds 1e8")]
    IllConditioned(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("theta too expensive: {0}")]
    ThetaTooExpensive(String),
    #[error("enumeration too expensive: {0}")]
    EnumerationTooExpensive(String),
    #[error("john unsupported: {0}")]
    JohnUnsupported(String),
    #[error("not full dimensional: K ∩ Λ has rank {rank} < {dim}")]
    NotFullDimensional { rank: usize, dim: usize },
    #[error("attempts exhausted after {0} samples")]
    AttemptsExhausted(u64),
    #[error("klein sampler out of regime: s = {s} < max Gram-Schmidt norm {max_gs}; use the exact sampler")]
    OutOfRegime { s: f64, max_gs: f64 },
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("point set is full rank")]
    FullRank,
    #[error("no candidate normals")]
    NoCandidates,
    #[error("zero normal vector")]
    ZeroVector,
    #[error("integer overflow in exact arithmetic")]
    Overflow,
    #[error("internal check failed: {0}")]
    Internal(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable machine-readable code used by the command line front end.
    pub fn code(&self) -> &'static str {
        match self {
            Error::SingularBasis => "singular_basis",
            Error::IllConditioned(_) => "ill_conditioned",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InvalidInput(_) => "invalid_input",
            Error::ThetaTooExpensive(_) => "theta_too_expensive",
            Error::EnumerationTooExpensive(_) => "enumeration_too_expensive",
            Error::JohnUnsupported(_) => "john_unsupported",
            Error::NotFullDimensional { .. } => "not_full_dimensional",
            Error::AttemptsExhausted(_) => "attempts_exhausted",
            Error::OutOfRegime { .. } => "out_of_regime",
            Error::BudgetExceeded(_) => "budget_exceeded",
            Error::FullRank => "full_rank",
            Error::NoCandidates => "no_candidates",
            Error::ZeroVector => "zero_vector",
            Error::Overflow => "overflow",
            Error::Internal(_) => "internal",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}
