use std::str::FromStr;
use std::sync::Arc;

use super::{multiplier_block, tag_unit_square, BlockSystem, Field, NormBlock, Pairing, ProblemKind, SchurNorm, SystemMeta};
use crate::error::{Error, Result};
use crate::fem::{assemble_load, assemble_mass, assemble_trace_coupling, CellWeight, Family, FunctionSpace, TraceMode};
use crate::mesh::{extract_interface, InterfaceSelector, Mesh2D};

/// Essential conditions on the domain space of the trace problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum L2Bc {
    None,
    /// Homogeneous Dirichlet data on `∂Ω ∖ Γ`.
    ComplementOfGamma,
}

impl L2Bc {
    pub fn name(self) -> &'static str {
        match self {
            L2Bc::None => "none",
            L2Bc::ComplementOfGamma => "complement-of-gamma",
        }
    }
}

impl FromStr for L2Bc {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" | "neumann" => Ok(L2Bc::None),
            "complement-of-gamma" | "dirichlet" => Ok(L2Bc::ComplementOfGamma),
            _ => Err(Error::InvalidArgument(format!("unknown bc variant `{s}`"))),
        }
    }
}

/// Trace-constrained L² projection on the unit square with `Γ = {x = 0}`:
/// `[[M_Ω, Cᵀ], [C, 0]]`, primal norm `M_Ω`.
pub fn build_l2_trace(mesh: &Mesh2D, pairing: Pairing, bc: L2Bc, schur: SchurNorm) -> Result<BlockSystem> {
    let mesh = Arc::new(tag_unit_square(mesh)?);
    let dirichlet: &[&str] = match bc {
        L2Bc::None => &[],
        L2Bc::ComplementOfGamma => &["right", "bottom", "top"],
    };
    let v = FunctionSpace::new(mesh.clone(), Family::P2).with_dirichlet(dirichlet)?;
    let chain = Arc::new(extract_interface(&mesh, &InterfaceSelector::Tag("gamma"), dirichlet)?);
    let q = FunctionSpace::on_interface(
        chain,
        match pairing {
            Pairing::P2P1 => Family::P1,
            Pairing::P2P0 => Family::P0,
        },
    )?;
    let m = assemble_mass(&v, CellWeight::None);
    let c = assemble_trace_coupling(&v, &q, TraceMode::Scalar)?;
    let mut rhs = assemble_load(&v, |_| 1.0)?;
    rhs.extend(assemble_mass(&q, CellWeight::None).spmv(&vec![1.0; q.dim()])?);
    let norms = vec![NormBlock::Sparse(m.clone()), multiplier_block(&q, schur)?];
    BlockSystem::from_parts(
        vec![Field { name: "u", space: v }, Field { name: "lambda", space: q }],
        vec![m],
        vec![vec![Some(c)]],
        norms,
        rhs,
        SystemMeta {
            problem: ProblemKind::L2Trace,
            pairing: pairing.name().into(),
            bc: bc.name().into(),
            precond: schur.name(),
        },
    )
}
