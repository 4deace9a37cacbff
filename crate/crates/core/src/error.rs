use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature hit its subdivision cap before reaching tolerance.
    #[error(
        "quadrature did not converge on [{lo}, {hi}]: estimate {estimate:e}, \
         error {abs_error:e} after {subdivisions} subdivisions"
    )]
    Quadrature {
        lo: f64,
        hi: f64,
        estimate: f64,
        abs_error: f64,
        subdivisions: usize,
    },

    /// A bracketing root search failed.
    #[error("root finding failed: {0}")]
    Root(String),

    /// The requested per-period spend cannot be met by any strike.
    #[error("infeasible budget: per-period spend {spend:e} is outside the attainable price range ({min:e}, {max:e})")]
    InfeasibleBudget { spend: f64, min: f64, max: f64 },

    /// A trigger probability underflowed the log-space guard.
    #[error("strike too deep: trigger probability {probability:e} is below {guard:e}")]
    StrikeTooDeep { probability: f64, guard: f64 },

    /// A statistic is undefined because the distribution has no spread.
    #[error("degenerate distribution: {0}")]
    Degenerate(String),
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn ensure_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("{name} must be finite, got {value}")))
    }
}

pub(crate) fn ensure_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(domain(format!("{name} must be positive and finite, got {value}")))
    }
}
