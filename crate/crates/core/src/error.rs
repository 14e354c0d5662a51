use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("matrix is not symmetric (max deviation {deviation:.3e}, allowed {allowed:.3e})")]
    NotSymmetric { deviation: f64, allowed: f64 },

    #[error("matrix is not positive definite (minimum eigenvalue {min_eigenvalue:.6e})")]
    NotSpd { min_eigenvalue: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// The input is well formed but lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Σ violates the quantum condition Σ + (iħ/2)J ⪰ 0.
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("Robertson–Schrödinger inequality at mode {mode} is not saturated (slack {slack:.6e}, allowed {allowed:.3e})")]
    NotSaturated { mode: usize, slack: f64, allowed: f64 },

    #[error("symplectic capacity {capacity:.12} differs from πħ = {expected:.12} beyond tolerance")]
    Capacity { capacity: f64, expected: f64 },

    /// The input contradicts the hypotheses of the construction beyond numerical noise.
    #[error("inconsistency: {0}")]
    Inconsistency(String),

    #[error("plane is not symplectic (pairing {pairing:.3e})")]
    NotSymplecticPlane { pairing: f64 },

    #[error("section area check failed: {0}")]
    PropositionViolation(String),
}
