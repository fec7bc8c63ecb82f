//! Monte Carlo simulation of self-avoiding walks in bounded star-shaped
//! domains through the dilation ensemble, with lattice-effect corrections
//! and closed-form boundary densities to compare against.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod batch;
pub mod chain;
pub mod compare;
pub mod domains;
pub mod error;
pub mod estimator;
pub mod experiment;
pub mod exponents;
pub mod lattice_effect;
pub mod quad;
pub mod sc_map;
pub mod svg;
pub mod walk;

pub use error::{Error, Result};
