use thiserror::Error;

/// Errors raised by the numerical library and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix has a significantly negative eigenvalue {eigenvalue:.3e}")]
    NotPositive { eigenvalue: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("channel is not trace preserving (deviation {deviation:.3e})")]
    NotTracePreserving { deviation: f64 },

    #[error("map is not completely positive (Choi eigenvalue {eigenvalue:.3e})")]
    NotCompletelyPositive { eigenvalue: f64 },

    #[error("singular denominator: {0}")]
    Singular(String),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("no sign change of {quantity} over [{lo}, {hi}]")]
    NoSignChange { quantity: String, lo: f64, hi: f64 },

    #[error("ambiguous dressed-state labeling: bare state {target} has max overlap {overlap:.3} (competing with {competitor})")]
    AmbiguousLabel { target: String, competitor: String, overlap: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("tomographic design is incomplete (rank {rank} of {needed})")]
    IncompleteDesign { rank: usize, needed: usize },

    #[error("preparation set is rank deficient (rank {rank} of {needed})")]
    RankDeficientPreparations { rank: usize, needed: usize },

    #[error("outcome has zero probability: {0}")]
    ZeroProbability(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Configuration problems (bad input files, unknown keys, violated
    /// preconditions on parameters) as opposed to numerical failures.
    pub fn is_config_error(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Json(_) | Error::Parse(_) | Error::InvalidParameter(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
