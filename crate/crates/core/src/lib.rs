// `!(x > 0.0)` style guards are deliberate: they reject NaN as well. Table
// constants keep all published digits.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod acceptance;
pub mod bernoulli;
pub mod cli;
pub mod error;
pub mod expansions;
pub mod kernels;
pub mod monotonicity;
pub mod quadrature;
pub mod ratfamily;

pub use error::{Error, Result};
