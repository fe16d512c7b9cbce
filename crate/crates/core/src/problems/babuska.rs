use std::str::FromStr;
use std::sync::Arc;

use super::{multiplier_block, tag_unit_square, BlockSystem, Field, NormBlock, Pairing, ProblemKind, SchurNorm, SystemMeta};
use crate::error::{Error, Result};
use crate::fem::{assemble_load, assemble_mass, assemble_normal_derivative_coupling, assemble_stiffness, CellWeight, Family, FunctionSpace};
use crate::mesh::{extract_interface, InterfaceSelector, Mesh2D};

/// Boundary conditions on the sides meeting `Γ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BabuskaBc {
    /// Neumann on `y = 0, 1`, Dirichlet on `x = 1`.
    NeumannIntersect,
    /// Dirichlet on all of `∂Ω ∖ Γ`.
    DirichletIntersect,
}

impl BabuskaBc {
    pub fn name(self) -> &'static str {
        match self {
            BabuskaBc::NeumannIntersect => "neumann-intersect",
            BabuskaBc::DirichletIntersect => "dirichlet-intersect",
        }
    }
}

impl FromStr for BabuskaBc {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "neumann-intersect" | "neumann" => Ok(BabuskaBc::NeumannIntersect),
            "dirichlet-intersect" | "dirichlet" => Ok(BabuskaBc::DirichletIntersect),
            _ => Err(Error::InvalidArgument(format!("unknown bc variant `{s}`"))),
        }
    }
}

/// Poisson problem with the normal derivative on `Γ = {x = 0}` imposed by a
/// multiplier: `[[A_Ω, Dᵀ], [D, 0]]`, primal norm `A_Ω`.
pub fn build_babuska(mesh: &Mesh2D, pairing: Pairing, bc: BabuskaBc, schur: SchurNorm) -> Result<BlockSystem> {
    let mesh = Arc::new(tag_unit_square(mesh)?);
    let dirichlet: &[&str] = match bc {
        BabuskaBc::NeumannIntersect => &["right"],
        BabuskaBc::DirichletIntersect => &["right", "bottom", "top"],
    };
    let v = FunctionSpace::new(mesh.clone(), Family::P2).with_dirichlet(dirichlet)?;
    // The multiplier carries no boundary conditions, so no endpoint flags.
    let chain = Arc::new(extract_interface(&mesh, &InterfaceSelector::Tag("gamma"), &[])?);
    let q = FunctionSpace::on_interface(
        chain,
        match pairing {
            Pairing::P2P1 => Family::P1,
            Pairing::P2P0 => Family::P0,
        },
    )?;
    let a = assemble_stiffness(&v, 1.0)?;
    let d = assemble_normal_derivative_coupling(&v, &q, 1.0)?;
    let mut rhs = assemble_load(&v, |_| 1.0)?;
    rhs.extend(assemble_mass(&q, CellWeight::None).spmv(&vec![1.0; q.dim()])?);
    let norms = vec![NormBlock::Sparse(a.clone()), multiplier_block(&q, schur)?];
    BlockSystem::from_parts(
        vec![Field { name: "u", space: v }, Field { name: "lambda", space: q }],
        vec![a],
        vec![vec![Some(d)]],
        norms,
        rhs,
        SystemMeta {
            problem: ProblemKind::Babuska,
            pairing: pairing.name().into(),
            bc: bc.name().into(),
            precond: schur.name(),
        },
    )
}
