//! Exact construction and verification of trigonometric solutions of the
//! classical Yang–Baxter equation on (twisted) loop algebras.
//!
//! Everything is computed over [`scalar::Scalar`], an exact cyclotomic
//! number type; no floating point is used anywhere.

pub mod bdquad;
pub mod classify;
pub mod error;
pub mod json;
pub mod linalg;
pub mod loopalg;
pub mod regrade;
pub mod scalar;
pub mod simplelie;
pub mod trigtensor;

pub use error::{Error, Result};
pub use scalar::Scalar;
