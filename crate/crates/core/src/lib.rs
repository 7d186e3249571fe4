//! Numerical workbench for exact and approximate quantum error correction on
//! a handful of qubits.

// `!(x <= tol)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channels;
pub mod codes;
pub mod conditions;
pub mod error;
pub mod fidelity;
pub mod fletcher;
pub mod grid;
pub mod linalg;
pub mod recovery;
pub mod schema;

pub use error::{Error, Result};
pub use num_complex::Complex64;
