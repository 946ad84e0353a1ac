//! Complex polarizability bounds, finite-dimensional Y-problems and exact
//! acoustic scattering by a penetrable sphere.

pub mod acoustic_mie;
pub mod convention;
pub mod error;
pub mod mobius_bounds;
pub mod quadrature;
pub mod quasistatic_grid;
pub mod shape_polarizability;
pub mod verify;
pub mod y_problem;

pub use convention::{LossConvention, SignCheck};
pub use error::{Error, Result};
pub use num_complex::Complex64;
