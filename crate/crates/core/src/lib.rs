//! Random fields whose dependence structure is controlled by the gauge of a
//! star body: fractional Brownian fields with non-Euclidean norms and the
//! fractional Poisson fields that converge to them.
//!
//! The crate is organised along the pipeline:
//! [`geometry`] (star bodies, convex bodies, body transforms) feeds
//! [`gaussian`] (covariance kernels, exact simulation) and
//! [`poisson`] (exact shot-noise simulation, variance quadrature);
//! [`verify`] re-derives the connecting identities numerically and emits
//! machine-readable reports.

pub mod error;
pub mod gaussian;
pub mod geometry;
pub mod poisson;
pub mod quad;
pub mod report;
pub mod rng;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use report::{Quantity, Report};
