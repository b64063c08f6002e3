//! Nonlinear coherent states of generalized oscillator algebras.
//!
//! The crate builds the ladder structure of an oscillator deformed through
//! an E-function (`â_E|n⟩ = √E(n)|n−1⟩`), constructs the eigenstates of the
//! deformed annihilation operator, checks the moment equations of their
//! closure measure, and follows those states through a 50:50 beam splitter
//! to measure separability, Mandel Q and second-order coherence.

// Negated comparisons are used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod beamsplitter;
pub mod completeness;
pub mod error;
pub mod quadrature;
pub mod specfun;
pub mod states;

pub use error::{Error, Result};
