//! Numerical Kapustin–Witten gauge theory on gridded 4-manifolds.

pub mod error;
pub mod fields;
pub mod geometry;
pub mod greens;
pub mod kw;
pub mod lie;
mod scalar;
pub mod snapshot;
pub mod solver;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision geometry.
pub type Geometry = geometry::GridGeometry<f64>;
