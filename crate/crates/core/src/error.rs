use thiserror::Error;

/// Errors raised by the formula, limit and oracle layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// The parameter tuple is malformed (bad base, diameter, preset constraint).
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    /// A closed-form expression hits a vanishing denominator or a
    /// non-integral/negative count, so no graph can realize the parameters.
    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    /// Two independent evaluations of the same quantity disagree.
    #[error("internal consistency failure: {0}")]
    Consistency(String),

    /// The normalization requires a strictly positive variance.
    #[error("variance must be positive, got {0}")]
    NonPositiveVariance(String),

    /// Series/product evaluation problems (non-terminating series,
    /// vanishing lower Pochhammer, |q| >= 1 for infinite products).
    #[error("q-series: {0}")]
    QSeries(String),

    /// The requested operator word does not fit in the truncated Fock space.
    #[error("truncation too small: need length > {needed}, have {have}")]
    Truncation { needed: usize, have: usize },

    /// The constructed graph failed verification or its eigensolve was unreliable.
    #[error("oracle: {0}")]
    Oracle(String),
}

pub type Result<T> = std::result::Result<T, Error>;
