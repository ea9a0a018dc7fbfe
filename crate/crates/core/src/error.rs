use thiserror::Error;

use crate::quadrature::IntegralResult;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("quadrature budget exhausted (best estimate {} ± {})", best.value, best.error_estimate)]
    QuadratureBudget { best: IntegralResult },

    #[error("non-finite {what} at {at}")]
    NonFinite { what: &'static str, at: f64 },

    /// `s` too close to 1 for the normalization constant to be resolved.
    #[error("s = {s} is within {margin} of 1; use the limit symbols instead")]
    PrecisionGuard { s: f64, margin: f64 },

    #[error("cost guard: {0}")]
    CostGuard(String),

    /// Growth factor `exp(T·max(0, −min σ))` would overflow.
    #[error("flow overflow: T·(max growth rate) = {exponent} exceeds {limit}")]
    Overflow { exponent: f64, limit: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
