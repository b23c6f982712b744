use thiserror::Error;

/// Errors produced by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{what} out of domain: {value} ({expected})")]
    Domain {
        what: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("non-finite value {value} at grid point x = {x}")]
    NonFinite { x: f64, value: f64 },

    #[error("kernel singularity for k = {k}, r = {r}: t = {t} is within guard of {nearest}")]
    Singular { k: u64, r: i64, t: f64, nearest: f64 },

    #[error("kernel order r must be nonzero")]
    ZeroOrder,

    #[error("quadrature on [{a}, {b}] did not reach tolerance (estimate {error_estimate:e})")]
    Quadrature { a: f64, b: f64, error_estimate: f64 },

    #[error("improper integral at 0 diverges (partial value {partial} after s = {reach})")]
    Divergent { partial: f64, reach: f64 },

    #[error("epsilon sequence did not converge: {0}")]
    Convergence(String),

    #[error("insufficient data: {have} usable rows, need at least {need}")]
    InsufficientData { have: usize, need: usize },

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(what: &'static str, value: f64, expected: &'static str) -> Error {
    Error::Domain {
        what,
        value,
        expected,
    }
}
