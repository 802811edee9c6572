//! Exact symbolic engine for Poisson algebras of phase-space polynomials,
//! normal-ordered Weyl algebras, finite-dimensional Lie algebras and
//! polynomial quantization maps.

pub mod cli;
pub mod error;
pub mod lie;
pub mod linalg;
pub mod par;
pub mod parse;
pub mod phasepoly;
pub mod quantize;
pub mod scalar;
pub mod weyl;

pub use error::{Error, Result};
