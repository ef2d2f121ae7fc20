//! Numerical verification toolkit for Chern-character regulator cochains:
//! simplex quadrature, the Bloch–Wigner dilogarithm, transgression
//! cochains of group tuples, Grassmannian dilogarithm integrands and a
//! jet-based exterior algebra for the transgression identities.

pub mod dilog;
pub mod error;
pub mod extrapolate;
pub mod grassmann;
pub mod jet_forms;
pub mod linalg;
pub mod quad;
pub mod sample;
pub mod transgression;

pub use error::{Error, Result};
