//! Survival probability of a doorway state coupled to random-matrix
//! backgrounds: exact finite-N Monte Carlo, large-N closed forms, and the
//! characteristic-polynomial kernels that connect them.

pub mod analytic;
pub mod arrowhead;
pub mod ensembles;
pub mod error;
pub mod kernels;
pub mod linalg;
pub mod montecarlo;
pub mod quadrature;
pub mod seed;
pub mod special;

pub use error::{Error, Result};
