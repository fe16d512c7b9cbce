//! Operator preconditioning for interface-coupled saddle-point problems.
//!
//! The crate assembles trace-constrained L² projection, Babuška and primal
//! Darcy–Stokes systems on triangular meshes, builds Riesz-map
//! preconditioners with fractional interface norms, and measures MINRES
//! iteration counts and preconditioned condition numbers.

pub mod envelope;
pub mod error;
pub mod experiment;
pub mod fem;
pub mod fractional;
pub mod linalg;
pub mod mesh;
pub mod problems;
pub mod solvers;

pub use error::{Error, Result};
