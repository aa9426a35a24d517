//! Integral solutions of `x^p - m*y^p = z*w` for prime `p`.
//!
//! [`parametrization::generate`] builds a solution from seven integers
//! `(e, f, g, l, q, n, r)`; [`decomposition::decompose`] recovers such
//! integers from any solution whose `x, y, z` are pairwise coprime and whose
//! entries are all nonzero. [`oracle`] holds the brute-force checks that tie
//! the two directions together, and [`cli`] the command-line front end.

pub mod arith;
pub mod cli;
pub mod decomposition;
pub mod error;
pub mod oracle;
pub mod parametrization;

pub use arith::Int;
pub use decomposition::{decompose, Decomposition, DecompositionTrace, PartialTrace};
pub use error::{Error, Result};
pub use oracle::{SearchBounds, SearchReport};
pub use parametrization::{generate, ParameterTuple, PrimeExp, Solution};
