use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument `{name}` = {value} is outside its domain ({domain})")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("coefficient a_{index} has modulus {modulus}, above the bound {bound}")]
    CoefficientTooLarge {
        index: usize,
        modulus: f64,
        bound: f64,
    },

    #[error("non-finite coefficient at index {0}")]
    NonFinite(usize),

    #[error("empty coefficient list")]
    Empty,

    #[error("polynomial is identically zero")]
    ZeroPolynomial,

    #[error("no root in ({lo}, {hi})")]
    NoRoot { lo: f64, hi: f64 },

    #[error("uniqueness failed: {count} distinct roots in ({lo}, {hi})")]
    UniquenessFailed { count: usize, lo: f64, hi: f64 },

    #[error("unique root in ({lo}, {hi}) has even multiplicity, bisection impossible")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("functional exceeds 1 even at r = {0}")]
    ExceedsAtLowerEnd(f64),

    #[error("{0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_domain(
    name: &'static str,
    value: f64,
    ok: bool,
    domain: &'static str,
) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            domain,
        })
    }
}
