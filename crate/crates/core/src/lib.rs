//! Generalized graph signal processing over tensor-product spaces.
//!
//! Signals live on the product of a finite weighted graph and a separable
//! Hilbert space: each vertex carries a square-integrable function (a time
//! trace, a polynomial expansion, or another graph signal). The crate
//! provides the joint and partial Fourier-style transforms for such signals,
//! spectral filter families, sample-set design with least-squares recovery,
//! an infection-cascade simulator with joint spectral analysis, and the
//! experiment harness tying them together.

pub mod cascade;
pub mod csvio;
pub mod error;
pub mod experiments;
pub mod filters;
pub mod graph;
pub mod hilbert;
pub mod numerics;
pub mod sampling;
pub mod signal;

pub use error::GspError;
