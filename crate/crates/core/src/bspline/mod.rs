//! Knot vectors, Cox-de Boor basis functions and planar NURBS curves.

mod curve;
mod knots;

pub use curve::{NurbsCurve, Point};
pub use knots::{KnotInterval, KnotVector};
