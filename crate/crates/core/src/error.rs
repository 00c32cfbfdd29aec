use thiserror::Error;

/// Errors raised by the qubit channel toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("coherence vector norm {norm} exceeds 1")]
    InvalidState { norm: f64 },

    #[error("matrix is not a valid density operator: {reason}")]
    InvalidDensity { reason: String },

    #[error("measurement axis must have unit norm, got {norm}")]
    NonUnitAxis { norm: f64 },

    #[error("channel is not completely positive (min Choi eigenvalue {min_eigenvalue:e})")]
    NotCompletelyPositive { min_eigenvalue: f64 },

    #[error("constraint value k = {k} is infeasible, |k| must not exceed {max}")]
    InfeasibleConstraint { k: f64, max: f64 },

    /// The closed-form ellipse reduction divides by a quantity that is too
    /// close to zero; the caller should use the direct solver instead.
    #[error("ellipse reduction is ill-conditioned: {reason}")]
    ReductionFallback { reason: &'static str },

    #[error("degenerate conic: {reason}")]
    DegenerateConic { reason: &'static str },

    #[error("{name} = {value} is outside [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            min: 0.0,
            max: 1.0,
        })
    }
}
