use thiserror::Error;

/// Errors surfaced by field construction, sampling, transport and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    /// A query left the domain a source is defined on. The message names the
    /// offending coordinate and the hull.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate matrix: {0}")]
    Degenerate(String),

    #[error("field invariant violated: {0}")]
    Invariant(String),

    #[error("monodromy gate exceeded: measured deviation {measured:.3e} > gate {gate:.3e} at theta = {theta}")]
    MonodromyGate { measured: f64, gate: f64, theta: f64 },

    #[error("evolution blow-up at step {step}: {detail}")]
    BlowUp { step: usize, detail: String },

    #[error("non-finite transport coefficient at u = {u}")]
    NonFiniteCoefficient { u: f64 },

    #[error("snapshot format error at byte {offset}: {detail}")]
    Format { offset: u64, detail: String },

    #[error("domain too small: boundary leak estimate {leak:.3e} exceeds 0.1")]
    DomainTooSmall { leak: f64 },

    #[error("singular coordinate: {0}")]
    Singular(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
