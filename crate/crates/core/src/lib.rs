//! Operators on the space of smooth functions on `[0, 1]` that are flat at 0.
//!
//! The crate provides exact Bell polynomial combinatorics, expression trees
//! for flat functions and multipliers, the differentiation, Volterra and
//! multiplication operators with their composite families, explicit
//! resolvents, spectrum classifiers with seminorm sweeps, and a dense
//! finite-dimensional eigenvalue oracle.

pub mod bell;
pub mod error;
pub mod flatfn;
pub mod multipliers;
pub mod operators;
pub mod resolvents;
pub mod seqspace;
pub mod spectra;
pub mod suites;

pub use error::{Error, Result};
pub use num_complex::Complex64;
