//! Forward simulation and single-realization statistical inversion for random
//! Schrödinger scattering in three dimensions.

// `!(x > 0.0)` style checks are kept on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod fft;
pub mod field;
pub mod geometry;
pub mod migr;
pub mod oracles;
pub mod quad;
pub mod recovery;
pub mod rsgf;
pub mod scatter;
pub mod validate;

pub use error::{Error, Result};
pub use field::{ComplexField, GridSpec, ScalarField};
