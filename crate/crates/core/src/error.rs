use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The stream text or update sequence breaks the model (bad syntax, node
    /// out of range, multiplicity outside {0, 1}).
    #[error("malformed stream: {0}")]
    MalformedStream(String),

    /// Parameters that no input could satisfy (odd `n*d` for a regular graph, k = 0, ...).
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The input is outside the operation's domain (disconnected graph, non-regular graph, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A randomized subroutine failed in a way that a reseeded run may fix.
    #[error("retryable failure: {0}")]
    Retryable(String),

    /// Every reseeded attempt of a randomized subroutine failed.
    #[error("gave up after {attempts} attempts: {last}")]
    RetriesExhausted { attempts: u32, last: String },

    #[error("space budget exceeded: {peak} words > budget {budget}")]
    BudgetExceeded { peak: usize, budget: usize },

    #[error("oracle budget exceeded: {0}")]
    OracleBudget(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn is_retryable(&self) -> bool {
        matches!(self, Error::Retryable(_))
    }
}

/// Runs `attempt` with successive seeds until it stops failing retryably.
///
/// Non-retryable errors are returned as-is. The seed for attempt `i` is
/// derived from `seed` so reruns with the same seed are reproducible.
pub fn with_retries<T>(
    seed: u64,
    max_attempts: u32,
    mut attempt: impl FnMut(u64) -> Result<T>,
) -> Result<T> {
    let mut last = String::new();
    for i in 0..max_attempts {
        match attempt(crate::rng::derive(seed, "retry", i as u64)) {
            Err(Error::Retryable(msg)) => last = msg,
            other => return other,
        }
    }
    Err(Error::RetriesExhausted { attempts: max_attempts, last })
}
