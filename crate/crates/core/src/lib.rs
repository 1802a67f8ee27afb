//! Weak Galerkin finite elements on polygonal meshes.
//!
//! The crate builds the primal, primal-mixed, mixed and hybridized mixed weak
//! Galerkin discretizations of `-div(a grad u) = f` with homogeneous
//! Dirichlet data, the hybridizable discontinuous Galerkin (HDG) scheme in
//! its flux and condensed forms, and a harness that compares the discrete
//! solutions of these schemes and measures convergence.

pub mod cli;
pub mod error;
pub mod mesh;
pub mod polybasis;
pub mod schemes;
pub mod verify;
pub mod weakcalc;

pub use error::{Error, Result};
pub use mesh::{PolygonalMesh, Rect};
