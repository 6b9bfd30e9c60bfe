use thiserror::Error;

/// Errors produced by the rate, bound, pairing, and simulation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A pair was presented with the weak user stronger than the strong one.
    #[error("ordering error: gamma_s ({gamma_s}) < gamma_w ({gamma_w})")]
    Ordering { gamma_s: f64, gamma_w: f64 },

    /// A bound expression hit a numerically degenerate denominator.
    #[error("singularity error: {0}")]
    Singularity(String),

    /// A pair admits no power split satisfying both rate bounds.
    #[error("feasibility error: {0}")]
    Feasibility(String),

    /// Invalid configuration (rate table, simulation parameters, ...).
    #[error("configuration error: {0}")]
    Config(String),
}
