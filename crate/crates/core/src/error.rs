use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid step function: {0}")]
    InvalidStep(String),

    #[error("invalid boundary data: {0}")]
    InvalidBoundary(String),

    #[error("domain lengths differ: {0} vs {1}")]
    DomainMismatch(f64, f64),

    #[error("invalid lambda {0}: {1}")]
    InvalidLambda(f64, &'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Every facet speed is zero, so there is no next event.
    #[error("no event ahead: all facet speeds vanish")]
    NoEvent,

    #[error("flow exceeded {0} epochs without reaching a terminal state")]
    IterationCap(usize),

    #[error("flow invariant broken: {0}")]
    FlowInvariant(String),

    #[error("oracle stopped after {iterations} iterations with duality gap {gap:e}")]
    NonConvergence { iterations: usize, gap: f64 },

    /// The exact solver produced a candidate whose certificate does not verify.
    #[error("solver self-check failed: {0}")]
    CertificateFailed(String),
}
