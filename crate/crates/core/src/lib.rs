//! Boundary integral operators for the two-dimensional Helmholtz equation.

pub mod error;
pub mod assembly;
pub mod billiards;
pub mod disk_oracle;
pub mod geom;
pub mod linalg;
pub mod operators;
pub mod specfun;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
