use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("probability out of range: {value} at {location}")]
    ProbabilityOutOfRange { value: f64, location: String },

    #[error("multinoulli row {row} sums to {sum}, expected 1 (tolerance {tol:e})")]
    RowSum { row: usize, sum: f64, tol: f64 },

    #[error("empty ensemble: {0}")]
    Empty(&'static str),

    #[error("multinoulli rows must have equal length >= 2 (row {row} has {len})")]
    CategoryCount { row: usize, len: usize },

    #[error("envelope undefined for |lambda| >= 1 (lambda = {0})")]
    EnvelopeUndefined(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("enumeration cap exceeded ({outcomes} outcomes > 2^24); use montecarlo")]
    EnumerationCap { outcomes: f64 },

    #[error("invalid ensemble json: {0}")]
    Json(String),

    #[error("output error: {0}")]
    Output(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
