use std::str::FromStr;
use std::sync::Arc;

use super::{BlockSystem, Field, NormBlock, ProblemKind, SystemMeta};
use crate::error::{Error, Result};
use crate::fem::{
    assemble_divergence, assemble_load, assemble_mass, assemble_normal_derivative_coupling,
    assemble_stiffness, assemble_tangential_mass, assemble_trace_coupling, assemble_vector_load,
    CellWeight, Family, FunctionSpace, TraceMode,
};
use crate::fractional::{build_multiplier_norm, NormTerm};
use crate::mesh::{extract_interface, generate_crossed, InterfaceSelector, Mesh2D, Rect, TagRule};

/// Physical parameters of the coupled problem. `D` is always derived.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParameterSet {
    pub mu: f64,
    pub k: f64,
    pub alpha: f64,
}

impl ParameterSet {
    pub fn new(mu: f64, k: f64, alpha: f64) -> Result<Self> {
        let p = ParameterSet { mu, k, alpha };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu.is_finite()) || !(self.k > 0.0 && self.k.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "mu and K must be positive (mu = {}, K = {})",
                self.mu, self.k
            )));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!("alpha = {} must be non-negative", self.alpha)));
        }
        Ok(())
    }

    /// BJS coefficient `α √(μ / K)`.
    pub fn d(&self) -> f64 {
        self.alpha * (self.mu / self.k).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DsPrecond {
    /// Multiplier norm `(1/μ) H(−½) + K H(½)`.
    Naive,
    /// Multiplier norm `(1/μ) H(−½) + K h⁻¹M`.
    Robust,
}

impl DsPrecond {
    pub fn name(self) -> &'static str {
        match self {
            DsPrecond::Naive => "naive-ds",
            DsPrecond::Robust => "robust-ds",
        }
    }
}

impl FromStr for DsPrecond {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive-ds" | "naive" => Ok(DsPrecond::Naive),
            "robust-ds" | "robust" => Ok(DsPrecond::Robust),
            _ => Err(Error::InvalidArgument(format!("unknown Darcy–Stokes preconditioner `{s}`"))),
        }
    }
}

/// Crossed mesh of `[0,2]×[0,1]` with `2^level` squares per unit length,
/// regions `f` (x < 1) and `p`, and sides tagged `f_dirichlet` (x = 0),
/// `p_dirichlet` (x = 2) and `neumann`.
pub fn darcy_stokes_mesh(level: u32) -> Result<Mesh2D> {
    if level > 12 {
        return Err(Error::InvalidArgument(format!("level {level} is too large")));
    }
    let n = 1usize << level;
    let mesh = generate_crossed(2 * n, n, Rect::new(0.0, 2.0, 0.0, 1.0))?;
    let mesh = mesh.tag_boundary(&[
        TagRule::new("f_dirichlet", |p| p[0].abs() < 1e-10),
        TagRule::new("p_dirichlet", |p| (p[0] - 2.0).abs() < 1e-10),
        TagRule::otherwise("neumann"),
    ])?;
    Ok(mesh.with_regions(|c| Some(if c[0] < 1.0 { "f" } else { "p" }.to_string())))
}

/// Primal Darcy–Stokes system with fields `(u_f, p_p, p_f, λ)`.
pub fn build_darcy_stokes(params: ParameterSet, level: u32, precond: DsPrecond) -> Result<BlockSystem> {
    params.validate()?;
    let parent = darcy_stokes_mesh(level)?;
    let fluid = Arc::new(parent.submesh("f", "interface")?.0);
    let porous = Arc::new(parent.submesh("p", "interface")?.0);
    // Chain normal is +x: outward from the fluid, into the porous domain.
    let gamma = extract_interface(&fluid, &InterfaceSelector::line(|p| (p[0] - 1.0).abs() < 1e-10), &[])?;
    let gamma_p = Arc::new(gamma.flipped());
    let gamma = Arc::new(gamma);

    let (mu, k) = (params.mu, params.k);
    let uf = FunctionSpace::new(fluid.clone(), Family::VectorP2).with_dirichlet(&["f_dirichlet"])?;
    let pp = FunctionSpace::new(porous.clone(), Family::P2).with_dirichlet(&["p_dirichlet"])?;
    let pf = FunctionSpace::new(fluid.clone(), Family::P1);
    let lam = FunctionSpace::on_interface(gamma.clone(), Family::P0)?;
    let lam_p = FunctionSpace::on_interface(gamma_p, Family::P0)?;

    let a_u = assemble_stiffness(&uf, mu)?.add_scaled(&assemble_tangential_mass(&uf, &gamma, params.d())?, 1.0)?;
    let a_u = a_u.mark_symmetric()?;
    let a_p = assemble_stiffness(&pp, k)?;
    let b_div = assemble_divergence(&uf, &pf)?;
    let t_n = assemble_trace_coupling(&uf, &lam, TraceMode::NormalComponent)?;
    let d_p = assemble_normal_derivative_coupling(&pp, &lam_p, -k)?;

    let lam_terms = match precond {
        DsPrecond::Naive => vec![(1.0 / mu, NormTerm::hs(-0.5)), (k, NormTerm::hs(0.5))],
        DsPrecond::Robust => vec![(1.0 / mu, NormTerm::hs(-0.5)), (k, NormTerm::MassHinv)],
    };
    let norms = vec![
        NormBlock::Sparse(a_u.clone()),
        NormBlock::Sparse(a_p.clone()),
        NormBlock::Sparse(assemble_mass(&pf, CellWeight::Constant(1.0 / mu))),
        NormBlock::Multiplier(build_multiplier_norm(&lam, &lam_terms)?),
    ];

    let mut rhs = assemble_vector_load(&uf, |_| [1.0, 1.0])?;
    rhs.extend(assemble_load(&pp, |_| 1.0)?);
    rhs.extend(std::iter::repeat(0.0).take(pf.dim() + lam.dim()));

    BlockSystem::from_parts(
        vec![
            Field { name: "u_f", space: uf },
            Field { name: "p_p", space: pp },
            Field { name: "p_f", space: pf },
            Field { name: "lambda", space: lam },
        ],
        vec![a_u, a_p],
        vec![vec![Some(b_div), None], vec![Some(t_n), Some(d_p)]],
        norms,
        rhs,
        SystemMeta {
            problem: ProblemKind::DarcyStokes,
            pairing: "P2-P2-P1-P0".into(),
            bc: "mixed".into(),
            precond: precond.name().into(),
        },
    )
}
