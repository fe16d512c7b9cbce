//! Sparse and dense linear algebra used by the assembly and solver layers.

mod dense;
mod factor;
mod lanczos;
mod sparse;

pub use dense::{
    dense_generalized_eig, dense_generalized_eigenvalues, symmetric_eigen, symmetric_eigenvalues,
    DenseCholesky, DenseMatrix,
};
pub use factor::{factorize, FactorKind, Factorization};
pub use lanczos::{lanczos_extremes, LanczosExtremes, LanczosOptions};
pub use sparse::{reverse_cuthill_mckee, SparseMatrix, TripletBuilder};

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
