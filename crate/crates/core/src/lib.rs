//! Numerical toolkit for eigenvalue sums of the operator |p| on bounded domains.

pub mod bounds;
pub mod density;
mod error;
pub mod geometry;
pub mod harness;
pub mod lemma;
pub mod quadrature;
pub mod special;
pub mod spectral;

pub use error::{Error, Result};
pub use geometry::{Domain, Shape};
