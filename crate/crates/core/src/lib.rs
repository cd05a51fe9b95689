//! Bell functionals, quantum strategies and bounds for bipartite scenarios.
//!
//! Correlations are tables `P(a,b|x,y)` over a [`Scenario`] `(2, m, n)`.
//! Outcome `a` carries the sign `(−1)^a` whenever correlators are involved.
//! The crate computes local bounds by enumeration ([`local`]), quantum lower
//! bounds in fixed dimension ([`optimize`]) and dimension-free upper bounds
//! from the NPA hierarchy ([`npa`]), and provides the symmetrization and
//! mirror-symmetry tools of [`symmetry`].

pub mod catalog;
mod correlation;
mod error;
mod functional;
pub mod io;
pub mod linalg;
pub mod local;
pub mod npa;
pub mod optimize;
pub mod quantum;
mod scenario;
pub mod symmetry;

pub use catalog::CatalogEntry;
pub use correlation::{
    tsirelson_correlation, Correlation, CorrelatorView, SYMMETRY_TOL, VALIDITY_TOL,
};
pub use error::{Error, Result};
pub use functional::{BellFunctional, CorrelatorForm};
pub use local::{local_bound, symmetric_local_bound, DeterministicStrategy, LocalBound};
pub use quantum::{Measurement, QuantumStrategy};
pub use scenario::Scenario;
