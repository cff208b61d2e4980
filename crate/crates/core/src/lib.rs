//! Comonotonicity-based multivariate dependence measure.
//!
//! The measure compares the product moment of a random vector with that of
//! its comonotone counterpart:
//!
//! ```text
//! ρ(X) = (E[∏ X_i] − ∏ E[X_i]) / (E[∏ X_i^C] − ∏ E[X_i])
//! ```
//!
//! It is evaluated four independent ways: closed forms for parametric
//! families ([`analytic`]), quadrature of the defining integrals
//! ([`analytic::rho_from_copula`], [`oracle::tail_integral_rho`]), Monte
//! Carlo ([`oracle::mc_rho`]) and the sample estimators in [`empirical`].

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod cli;
pub mod empirical;
pub mod error;
pub mod model;
pub mod oracle;
pub mod quadrature;
pub mod rng;
pub mod simulate;
pub mod special;

pub use error::{Error, Result};
