//! Finite-depth Cantor-type interval constructions, the strip-valued maps
//! `P(X, z)` and `G(X, z)` built on them, and sampled certification of the
//! quantitative bounds they are meant to satisfy.

pub mod becker;
pub mod construction;
pub mod dimension;
pub mod error;
pub mod gmap;
pub mod interval_set;
pub mod poisson;
pub mod quadrature;
pub mod report;
pub mod sampling;
pub mod seed;
pub mod svg;
pub mod verify;

pub use error::{Error, Result};
pub use interval_set::IntervalSet;
