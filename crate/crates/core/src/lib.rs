//! Explicit piecewise-rational inversion of planar NURBS curves.

pub mod bezier;
pub mod cli;
pub mod bspline;
pub mod document;
pub mod error;
pub mod fixtures;
pub mod inverse;
pub mod newton;
pub mod physical;
pub mod ratpoly;

pub use error::{Error, Result};
