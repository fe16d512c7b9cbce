//! Lagrange elements, function spaces with Dirichlet elimination, and the
//! bilinear forms of the benchmark problems.

mod assemble;
mod element;
mod space;

pub use assemble::{
    assemble_divergence, assemble_load, assemble_mass, assemble_normal_derivative_coupling,
    assemble_p0_interface_stiffness, assemble_stiffness, assemble_tangential_mass,
    assemble_trace_coupling, assemble_vector_load, facet_cells, CellWeight, TraceMode,
};
pub use element::{
    basis_gradients, basis_values, gauss_legendre, Family, TriangleGeometry, P2_EDGES,
    SEGMENT_RULE, TRIANGLE_RULE,
};
pub use space::{FunctionSpace, MeshRef};

use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;

/// Deletes the rows and columns of a form assembled on the unreduced spaces
/// that `rows` / `cols` eliminate.
pub fn apply_dirichlet(
    form: &SparseMatrix,
    rows: &FunctionSpace,
    cols: &FunctionSpace,
) -> Result<SparseMatrix> {
    if form.shape() != (rows.full_dim(), cols.full_dim()) {
        return Err(Error::ShapeMismatch(format!(
            "form of shape {:?} does not match spaces of full size ({}, {})",
            form.shape(),
            rows.full_dim(),
            cols.full_dim()
        )));
    }
    let mut out = form.select(&rows.free_dofs(), &cols.free_dofs());
    if form.is_marked_symmetric() && rows.free_dofs() == cols.free_dofs() {
        out = out.mark_symmetric()?;
    }
    Ok(out)
}

/// Applies [`apply_dirichlet`] to a list of `(form, row space, column space)`
/// blocks, so that every block sharing a space is reduced the same way.
pub fn apply_dirichlet_blocks(
    blocks: &[(&SparseMatrix, &FunctionSpace, &FunctionSpace)],
) -> Result<Vec<SparseMatrix>> {
    blocks.iter().map(|(f, r, c)| apply_dirichlet(f, r, c)).collect()
}
