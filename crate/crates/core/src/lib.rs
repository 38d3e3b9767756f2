//! Statistical resolution of diffraction-limited and super-resolution
//! microscopes.
//!
//! The resolution `d` at a point `x0` is the smallest separation at which
//! the optimal level-α test of "one source at `x0`" against "two sources
//! `d` apart" reaches power `1 − β`. This crate builds the binned photon
//! models behind that test and solves for `d` from asymptotic formulas,
//! exact normal theory and Monte-Carlo bisection.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod binning;
pub mod cli;
pub mod error;
pub mod models;
pub mod psf;
pub mod quadrature;
pub mod resolution;

pub use binning::{bin_probabilities, BinProbabilities, SourceConfig};
pub use error::{Error, Result};
pub use models::rng::RngState;
pub use models::{ModelKind, NoiseModel, TestReport};
pub use psf::PsfModel;
