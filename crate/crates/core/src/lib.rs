//! Exact integer-matrix machinery for the quantum tori attached to ideal
//! triangulations of punctured bordered surfaces: quiver and torus matrices,
//! their centers at roots of unity, PI-degree data, and the lattice and
//! cohomology computations used to cross-check everything.

pub mod amatrix;
pub mod center;
pub mod cohomology;
pub mod error;
pub mod matrix;
pub mod quiver;
pub mod surface;
pub mod zlattice;

pub use error::{Error, Result};
pub use matrix::IntMat;
