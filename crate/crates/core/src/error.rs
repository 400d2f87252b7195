use thiserror::Error;

/// Errors raised by the sampling, spectral and integration routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// Quadrature ran out of budget; carries the best estimate it had.
    #[error("quadrature did not converge: value {value:e}, error estimate {error:e} after {evaluations} evaluations")]
    QuadratureBudget {
        value: f64,
        error: f64,
        evaluations: usize,
    },

    /// A failure inside one Monte Carlo realization, tagged with the seed
    /// that reproduces it.
    #[error("realization {index} (seed {seed:#018x}) failed: {source}")]
    Realization {
        index: u64,
        seed: u64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::NumericalFailure(msg.into())
    }

    /// True for every variant that stems from a numerical breakdown rather
    /// than from bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::InvalidArgument(_) => false,
            Error::NumericalFailure(_) | Error::QuadratureBudget { .. } => true,
            Error::Realization { source, .. } => source.is_numerical(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
