use thiserror::Error;

/// Errors raised by curve evaluation, swaps, analytics and path handling.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AmmError {
    /// An input fell outside its mathematical domain.
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },

    /// The X reserve would reach or cross the point where the Y reserve hits zero.
    #[error("x = {x} is outside the solvency domain (x must stay below {bound})")]
    Insolvent { x: f64, bound: f64 },

    /// A trade would exhaust a reserve. `max_amount_in` is the supremum of feasible inputs.
    #[error("trade of {amount_in} is infeasible; maximum feasible input is {max_amount_in}")]
    TradeTooLarge { amount_in: f64, max_amount_in: f64 },

    /// A requested output is not available from the pool.
    #[error("requested output {amount_out} is not below the available {available}")]
    OutputUnavailable { amount_out: f64, available: f64 },

    #[error("trade size {amount} is dust relative to reserve {reserve}")]
    Dust { amount: f64, reserve: f64 },

    #[error("unsupported configuration: {0}")]
    Unsupported(&'static str),

    #[error("root finder did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },
}

pub type Result<T, E = AmmError> = std::result::Result<T, E>;

pub(crate) fn require_positive(what: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(AmmError::Domain { what, value })
    }
}
