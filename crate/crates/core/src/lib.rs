//! Finite truncations of compact planar sets whose orthogonal projections
//! have prescribed Assouad dimensions, with covering-number estimators,
//! weak-tangent studies and numerical checks of the construction's
//! quantitative bounds.

pub mod cli;
pub mod construction;
pub mod error;
pub mod estimator;
pub mod harness;
pub mod metrics;
pub mod pointfile;
pub mod profile;
pub mod scalar;
pub mod scheduler;
pub mod tangents;

pub use error::{Error, Result};
pub use scalar::Scalar;
