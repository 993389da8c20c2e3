//! Singular value inequalities for Hadamard-type products.
//!
//! The crate provides the weighted Ky Fan and column-length norms together
//! with their extreme-point candidate families, masked entrywise bilinear
//! forms (Hadamard and Fan products), randomized checkers for the classical
//! singular value inequalities, and a partial-trace lab with a counterexample
//! search for two open questions.

pub mod cli;
pub mod ensembles;
pub mod error;
pub mod forms;
pub mod matrix;
pub mod norms;
pub mod ptrace;
pub mod report;
pub mod suite;

pub use error::{Error, Result};
pub use matrix::ComplexMatrix;
