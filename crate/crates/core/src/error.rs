use thiserror::Error;

/// Failure signals shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An iterative routine ran out of budget. `partial` is the best value
    /// available at that point.
    #[error("{what} did not converge (partial value {partial:e}, error estimate {err_estimate:e})")]
    Convergence {
        what: String,
        partial: f64,
        err_estimate: f64,
    },

    #[error("bracket failure: {0}")]
    Bracket(String),

    #[error("divergent integral: {0}")]
    Divergence(String),

    #[error("insufficient grid resolution: {0}")]
    Resolution(String),

    #[error("derivative order {order} exceeds the supported maximum {max}")]
    UnsupportedOrder { order: u32, max: u32 },

    #[error("schema error{}: {msg}", row.map(|r| format!(" at row {r}")).unwrap_or_default())]
    Schema { row: Option<usize>, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
