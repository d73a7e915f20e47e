//! Error type shared by all pricing routines.

use thiserror::Error;

use crate::mc::McEstimate;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, QuantoError>;

#[derive(Debug, Error)]
pub enum QuantoError {
    /// A contract or model field failed validation.
    #[error("invalid parameter `{name}`: {message}")]
    InvalidParameter { name: &'static str, message: String },

    /// Local-volatility functions are only defined for strictly positive levels.
    #[error("level {0} is outside the local-vol domain (must be > 0)")]
    NonPositiveLevel(f64),

    /// The proxy variance vanished, so Greeks and expansions are undefined.
    #[error("degenerate proxy variance: total variance over the horizon is zero")]
    DegenerateVariance,

    /// Error-scale diagnostics require non-perfect correlation.
    #[error("correlation {0} is degenerate: |rho| must be < 1 for error scales")]
    DegenerateCorrelation(f64),

    #[error("Greek order {0} unsupported (max {max})", max = crate::proxy::MAX_GREEK_ORDER)]
    UnsupportedGreekOrder(usize),

    /// The iterated integral operator supports 1 to 4 layers.
    #[error("omega operator arity {0} unsupported (must be 1..=4)")]
    OmegaArity(usize),

    #[error("quadrature configuration: {0}")]
    QuadratureConfig(String),

    /// No volatility reproduces the requested option price.
    #[error(
        "price {price} outside the arbitrage band ({intrinsic}, {upper}) for implied vol inversion"
    )]
    NoImpliedVol {
        price: f64,
        intrinsic: f64,
        upper: f64,
    },

    /// The safeguarded Newton/bisection inversion ran out of iterations.
    #[error("implied vol solver did not converge after {0} iterations")]
    ImpliedVolNoConvergence(usize),

    /// The simulation budget ran out before the CI target was reached.
    /// Carries the best estimate obtained so far.
    #[error(
        "Monte Carlo budget exhausted before the CI target: best estimate {price} +/- {ci}",
        price = .best.price,
        ci = .best.ci_halfwidth
    )]
    McBudgetExhausted { best: McEstimate },
}

impl QuantoError {
    pub(crate) fn param(name: &'static str, message: impl Into<String>) -> Self {
        Self::InvalidParameter {
            name,
            message: message.into(),
        }
    }
}
