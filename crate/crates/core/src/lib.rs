//! Pricing of path-dependent options under geometric Brownian motion by
//! backward induction with Gauss-Hermite quadrature on cubic-spline
//! interpolated value functions.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bench;
pub mod contracts;
pub mod engine;
pub mod error;
pub mod linalg;
pub mod model;
pub mod oracles;
pub mod pricers;
pub mod quadrature;
pub mod spline;

pub use error::{Error, Result};
