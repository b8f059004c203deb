use thiserror::Error;

/// Errors raised by constructors, evaluators and identity checks.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A series failed the ratio test or did not settle within its term cap.
    #[error("series did not converge: {0}")]
    Convergence(String),

    /// The Fock cutoff cannot hold the requested state to the tail tolerance.
    #[error("cutoff {dim} leaves tail mass {tail:e} above {eps:e}; try a cutoff of at least {suggested}")]
    Cutoff {
        dim: usize,
        tail: f64,
        eps: f64,
        suggested: usize,
    },

    /// The unnormalized weights of a conditional state are all zero.
    #[error("degenerate state: {0}")]
    Degenerate(String),

    /// Quadrature refinement did not reach the requested stability.
    #[error("quadrature did not stabilise: last change {change:e} with {radial} radial x {angular} angular nodes")]
    Quadrature {
        change: f64,
        radial: usize,
        angular: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

/// `p` must lie strictly inside (0, 1).
pub(crate) fn check_open_unit(name: &str, p: f64) -> Result<()> {
    if p.is_finite() && p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        domain(format!("{name} must lie in (0, 1), got {p}"))
    }
}
