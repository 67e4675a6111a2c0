use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error(
        "steady state did not converge after {iterations} iterations \
         (alpha = {alpha}, beta_1 = {beta_1}, residual = {residual:e})"
    )]
    NonConvergence {
        alpha: f64,
        beta_1: f64,
        residual: f64,
        iterations: usize,
    },

    #[error("resonance search failed: {0}")]
    ResonanceNotBracketed(String),

    #[error("linearized dynamics are unstable (max Re(lambda) = {max_real_part:e})")]
    Unstable { max_real_part: f64 },

    #[error("singular linear system in Lyapunov solve")]
    SingularSystem,

    #[error("covariance matrix is not a physical Gaussian state: {0}")]
    NonPhysical(String),

    #[error("susceptibility is singular at omega = {omega}")]
    SingularResponse { omega: f64 },

    #[error("mean-field integration diverged at t = {t}")]
    Divergence { t: f64 },
}

impl Error {
    /// Short machine-readable tag, used as the `status` column of run output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::Domain(_) => "domain",
            Error::NonConvergence { .. } => "nonconvergence",
            Error::ResonanceNotBracketed(_) => "resonance_not_bracketed",
            Error::Unstable { .. } => "unstable",
            Error::SingularSystem => "singular",
            Error::NonPhysical(_) => "nonphysical",
            Error::SingularResponse { .. } => "singular_response",
            Error::Divergence { .. } => "divergence",
        }
    }

    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}
