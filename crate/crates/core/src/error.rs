use thiserror::Error;

/// Errors raised by the solver, diagnostics and I/O layers.
#[derive(Debug, Error)]
pub enum Error {
    /// Grid, sample or field shapes that do not fit together.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    /// An operation was called outside the parameter regime it supports.
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The integrator produced NaN/Inf or exceeded the H^1 ceiling.
    #[error("blow-up suspected after t = {last_valid_time}: {reason}")]
    BlowUpSuspected { last_valid_time: f64, reason: String },

    /// The Duhamel fixed-point map failed to contract on the requested interval.
    #[error("no contraction at iteration {iteration} (ratio {ratio:.3e})")]
    NoContraction { iteration: usize, ratio: f64 },

    /// A single time step already exceeds the smallness budget.
    #[error("partition infeasible at t = {time}: one step has Z' proxy {value:.3e} > {eta:.3e}")]
    PartitionInfeasible { time: f64, value: f64, eta: f64 },

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("report serialization failed: {0}")]
    Report(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Report(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Report(e.to_string())
    }
}
