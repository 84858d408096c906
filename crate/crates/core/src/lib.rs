//! Numerical toolkit for spectral analysis of non-normal complex matrices.
//!
//! The library realizes, at matrix scale, the calculus of tracial spectral
//! theory: generalized singular value functions, the `log`-F-norm, the
//! Fuglede-Kadison determinant, Brown measures (atomic and grid-regularized),
//! Haagerup-Schultz spectral projections (exact and by contour integration),
//! upper-triangular splitting T = N + Q along a spectral ordering, flag
//! pinching, and the associated submajorization inequalities. All
//! constructions are cross-checked against exact eigendecomposition oracles
//! in the test suites.

pub mod config;
pub mod error;
pub mod mat;

pub mod assign;
pub mod hs;
pub mod io;
pub mod kernel;
pub mod ensemble;
pub mod stats;
pub mod tri;
pub mod verify;

pub use config::Tolerances;
pub use error::{Error, Result};
pub use mat::{C64, OperatorMatrix};
