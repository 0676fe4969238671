//! Scalars, univariate and bivariate polynomials, and fraction-free
//! symbolic determinants.

mod bivariate;
mod matrix;
mod scalar;
mod univariate;

pub use bivariate::BivariatePoly;
pub use matrix::{scalar_det, PolyMatrix};
pub use scalar::{format_rational, parse_rational, Backend, Rational, Scalar};
pub use univariate::UnivariatePoly;
