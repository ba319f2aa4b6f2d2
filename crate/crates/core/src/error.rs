use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("operator is not Hermitian (asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("not a density matrix: {0}")]
    NotDensity(String),

    #[error("dimension {requested} exceeds the configured cap {cap}")]
    CapacityExceeded {
        requested: usize,
        cap: usize,
        /// Largest copy count that still fits, when the request was an n-copy one.
        largest_feasible_n: Option<usize>,
    },

    #[error("solver failure: {0}")]
    SolverFailure(String),

    #[error("bisection bracket error: {0}")]
    BracketError(String),

    #[error("degenerate witness: Tr(B rho) = {0:.3e}")]
    DegenerateWitness(f64),

    #[error("wrong regime: {0}")]
    WrongRegime(String),

    #[error("denominator unresolved: bracket [{lo}, {hi}]")]
    DenominatorUnresolved { lo: f64, hi: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
