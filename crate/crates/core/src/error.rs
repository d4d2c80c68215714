use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("series did not converge after {terms} terms")]
    NonConvergence { terms: usize },

    #[error("contour failure: {0}")]
    Contour(String),

    #[error("quadrature tolerance not met: value {value:e}, error estimate {error:e}")]
    ToleranceNotMet { value: f64, error: f64 },

    #[error("power split infeasible: a1 = {a1} must exceed eps1 * a2 = {bound}")]
    Infeasible { a1: f64, bound: f64 },

    #[error("candidate a2 = {a2} failed after {} evaluated points: {source}", partial.len())]
    CandidateFailed {
        a2: f64,
        partial: Vec<(f64, f64)>,
        source: Box<Error>,
    },
}

impl Error {
    /// True for errors caused by the inputs rather than by the numerics.
    pub fn is_config_error(&self) -> bool {
        matches!(self, Error::InvalidConfig(_) | Error::Infeasible { .. })
    }
}
