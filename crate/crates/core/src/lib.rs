//! Eigenvalue densities and mean eigenvector self-overlaps in the real and
//! complex elliptic Ginibre ensembles.
//!
//! The crate has two halves that check each other:
//!
//! - closed-form evaluators: exact finite-N densities and mean
//!   self-overlaps ([`finite_n`]) and their large-N regime limits
//!   ([`asymptotics`]), built on overflow-safe special functions
//!   ([`specfun`]);
//! - a Monte Carlo engine: correlated Gaussian matrix sampling
//!   ([`sampling`]) and bi-orthogonal eigenvector overlap measurement with
//!   conditional binning ([`spectra`]).
//!
//! All evaluators are pure and reentrant; the Monte Carlo estimators are
//! deterministic for a fixed seed regardless of worker count.

pub mod asymptotics;
pub mod error;
pub mod finite_n;
pub mod sampling;
pub mod specfun;
pub mod spectra;

pub use error::{Error, Result};
pub use finite_n::{ComplexPoint, Conditional, EnsembleKind, EnsembleSpec, FiniteNResult};
