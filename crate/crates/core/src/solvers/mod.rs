//! Preconditioned MINRES and condition numbers of the preconditioned operator.

mod minres;
mod spectrum;
mod sweep;

pub use minres::{minres, BlockPreconditioner, MinresConfig, SolveReport};
pub use spectrum::{condition_number, SpectrumMethod, SpectrumReport, DEFAULT_DENSE_CAP};
pub use sweep::iteration_sweep;
