//! Sharp Bohr-type inequalities for bounded analytic functions on the unit
//! disk: exact constants, proof certificates, radius search and randomized
//! probes.

pub mod certify;
pub mod constants;
pub mod error;
pub mod functionals;
pub mod lemma;
mod numeric;
pub mod radius;
pub mod sampler;
pub mod series;

pub use error::{Error, Result};
pub use functionals::{FunctionalKind, FunctionalSpec, ProofFunctionKind};
pub use series::{MoebiusFunction, PowerSeries, Truncated};
