//! Renormalized point (Dirac-delta) interactions on model Riemannian
//! manifolds: heat kernels, Krein-type principal matrices, bound-state
//! spectra, and numerical verification of the operator-existence criteria
//! and analytic bounds.

pub mod error;
pub mod quad;
pub mod geometry;
pub mod fit;
pub mod lattice;
pub mod lee;
pub mod point_interaction;
pub mod relativistic;
pub mod rootfind;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
