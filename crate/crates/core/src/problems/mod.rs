//! Benchmark saddle-point systems and their Riesz-map norm matrices.

mod babuska;
mod darcy_stokes;
mod l2_trace;

pub use babuska::{build_babuska, BabuskaBc};
pub use darcy_stokes::{build_darcy_stokes, darcy_stokes_mesh, DsPrecond, ParameterSet};
pub use l2_trace::{build_l2_trace, L2Bc};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fem::FunctionSpace;
use crate::fractional::{build_multiplier_norm, MultiplierNorm, NormTerm};
use crate::linalg::{DenseMatrix, SparseMatrix};
use crate::mesh::{Mesh2D, TagRule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    L2Trace,
    Babuska,
    DarcyStokes,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::L2Trace => "l2-trace",
            ProblemKind::Babuska => "babuska",
            ProblemKind::DarcyStokes => "darcy-stokes",
        }
    }
}

impl FromStr for ProblemKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l2-trace" => Ok(ProblemKind::L2Trace),
            "babuska" => Ok(ProblemKind::Babuska),
            "darcy-stokes" => Ok(ProblemKind::DarcyStokes),
            _ => Err(Error::InvalidArgument(format!("unknown problem `{s}`"))),
        }
    }
}

/// Domain / multiplier element pairing of the scalar problems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pairing {
    P2P1,
    P2P0,
}

impl Pairing {
    pub fn name(self) -> &'static str {
        match self {
            Pairing::P2P1 => "P2-P1",
            Pairing::P2P0 => "P2-P0",
        }
    }
}

impl FromStr for Pairing {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().replace('_', "-").as_str() {
            "P2-P1" | "P2P1" => Ok(Pairing::P2P1),
            "P2-P0" | "P2P0" => Ok(Pairing::P2P0),
            _ => Err(Error::InvalidArgument(format!("unknown pairing `{s}`"))),
        }
    }
}

/// Norm assigned to the multiplier of the scalar problems.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SchurNorm {
    /// Interface mass matrix.
    IdentityMass,
    /// Mass weighted by inverse cell length.
    HinvMass,
    /// Fractional norm matrix `H(s)`.
    Fractional(f64),
}

impl SchurNorm {
    pub fn name(self) -> String {
        match self {
            SchurNorm::IdentityMass => "identity-mass".into(),
            SchurNorm::HinvMass => "hinv-mass".into(),
            SchurNorm::Fractional(s) => format!("fractional({s})"),
        }
    }

    pub fn terms(self) -> Vec<(f64, NormTerm)> {
        match self {
            SchurNorm::IdentityMass => vec![(1.0, NormTerm::Mass)],
            SchurNorm::HinvMass => vec![(1.0, NormTerm::MassHinv)],
            SchurNorm::Fractional(s) => vec![(1.0, NormTerm::hs(s))],
        }
    }
}

impl fmt::Display for SchurNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for SchurNorm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "identity-mass" | "identity" => return Ok(SchurNorm::IdentityMass),
            "hinv-mass" => return Ok(SchurNorm::HinvMass),
            _ => {}
        }
        if let Some(inner) = s.strip_prefix("fractional(").and_then(|r| r.strip_suffix(')')) {
            let v: f64 = match inner.trim() {
                "1/2" | "+1/2" => 0.5,
                "-1/2" => -0.5,
                other => other
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad fractional order `{other}`")))?,
            };
            if !(-1.0..=1.0).contains(&v) {
                return Err(Error::InvalidArgument(format!("fractional order {v} outside [-1, 1]")));
            }
            return Ok(SchurNorm::Fractional(v));
        }
        Err(Error::InvalidArgument(format!("unknown preconditioner `{s}`")))
    }
}

/// Preconditioner presets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PrecondVariant {
    Schur(SchurNorm),
    Ds(DsPrecond),
}

impl PrecondVariant {
    pub fn name(self) -> String {
        match self {
            PrecondVariant::Schur(s) => s.name(),
            PrecondVariant::Ds(d) => d.name().into(),
        }
    }
}

impl FromStr for PrecondVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "naive-ds" => Ok(PrecondVariant::Ds(DsPrecond::Naive)),
            "robust-ds" => Ok(PrecondVariant::Ds(DsPrecond::Robust)),
            other => other.parse().map(PrecondVariant::Schur),
        }
    }
}

/// One diagonal block of the norm matrix `N`.
#[derive(Clone, Debug)]
pub enum NormBlock {
    Sparse(SparseMatrix),
    Multiplier(MultiplierNorm),
}

impl NormBlock {
    pub fn dim(&self) -> usize {
        match self {
            NormBlock::Sparse(m) => m.nrows(),
            NormBlock::Multiplier(m) => m.matrix().nrows(),
        }
    }

    pub fn to_sparse(&self) -> SparseMatrix {
        match self {
            NormBlock::Sparse(m) => m.clone(),
            NormBlock::Multiplier(m) => SparseMatrix::from_dense(m.matrix()),
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            NormBlock::Sparse(m) => m.to_dense(),
            NormBlock::Multiplier(m) => m.matrix().clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Field {
    pub name: &'static str,
    pub space: FunctionSpace,
}

/// Descriptive labels carried into run records.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemMeta {
    pub problem: ProblemKind,
    pub pairing: String,
    pub bc: String,
    pub precond: String,
}

/// Symmetric block operator `𝒜`, block-diagonal norm `N`, and load vector.
/// The first `num_primal` fields form the primal part; the others are
/// constraints (zero diagonal blocks in `𝒜`).
#[derive(Clone, Debug)]
pub struct BlockSystem {
    pub fields: Vec<Field>,
    /// Full block grid; `blocks[i][j]` is `None` for zero blocks.
    pub blocks: Vec<Vec<Option<SparseMatrix>>>,
    pub norms: Vec<NormBlock>,
    pub rhs: Vec<f64>,
    pub num_primal: usize,
    pub meta: SystemMeta,
}

impl BlockSystem {
    /// Builds the grid from the primal diagonal blocks and the constraint
    /// rows `c[k][i]` (constraint field `k`, primal field `i`); the upper
    /// triangle is filled with transposes.
    pub fn from_parts(
        fields: Vec<Field>,
        primal: Vec<SparseMatrix>,
        constraints: Vec<Vec<Option<SparseMatrix>>>,
        norms: Vec<NormBlock>,
        rhs: Vec<f64>,
        meta: SystemMeta,
    ) -> Result<Self> {
        let np = primal.len();
        let nf = np + constraints.len();
        if fields.len() != nf || norms.len() != nf {
            return Err(Error::ShapeMismatch("field, block and norm counts differ".into()));
        }
        let mut blocks: Vec<Vec<Option<SparseMatrix>>> = vec![vec![None; nf]; nf];
        for (i, a) in primal.into_iter().enumerate() {
            blocks[i][i] = Some(a);
        }
        for (k, row) in constraints.into_iter().enumerate() {
            if row.len() != np {
                return Err(Error::ShapeMismatch("constraint row has wrong length".into()));
            }
            for (i, c) in row.into_iter().enumerate() {
                if let Some(c) = c {
                    blocks[i][np + k] = Some(c.transpose());
                    blocks[np + k][i] = Some(c);
                }
            }
        }
        for (i, f) in fields.iter().enumerate() {
            let n = f.space.dim();
            if norms[i].dim() != n {
                return Err(Error::ShapeMismatch(format!(
                    "norm block of field {} has size {} but the space has {n} dofs",
                    f.name,
                    norms[i].dim()
                )));
            }
            for j in 0..nf {
                if let Some(b) = &blocks[i][j] {
                    if b.shape() != (n, fields[j].space.dim()) {
                        return Err(Error::ShapeMismatch(format!(
                            "block ({}, {}) has shape {:?}",
                            f.name,
                            fields[j].name,
                            b.shape()
                        )));
                    }
                }
            }
        }
        let total: usize = fields.iter().map(|f| f.space.dim()).sum();
        if rhs.len() != total {
            return Err(Error::ShapeMismatch("right-hand side length".into()));
        }
        Ok(BlockSystem {
            fields,
            blocks,
            norms,
            rhs,
            num_primal: np,
            meta,
        })
    }

    pub fn dofs(&self) -> Vec<usize> {
        self.fields.iter().map(|f| f.space.dim()).collect()
    }

    pub fn dim(&self) -> usize {
        self.dofs().iter().sum()
    }

    pub fn offsets(&self) -> Vec<usize> {
        let mut o = vec![0];
        for d in self.dofs() {
            o.push(o.last().unwrap() + d);
        }
        o
    }

    /// The assembled operator `𝒜`.
    pub fn matrix(&self) -> Result<SparseMatrix> {
        let dofs = self.dofs();
        let zero: Vec<SparseMatrix> = dofs.iter().map(|&n| SparseMatrix::zeros(n, n)).collect();
        let grid: Vec<Vec<Option<&SparseMatrix>>> = self
            .blocks
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, b)| b.as_ref().or((i == j).then_some(&zero[i])))
                    .collect()
            })
            .collect();
        SparseMatrix::block(&grid)
    }

    /// The assembled norm matrix `N` (dense multiplier blocks included).
    pub fn norm_matrix(&self) -> Result<SparseMatrix> {
        let blocks: Vec<SparseMatrix> = self.norms.iter().map(NormBlock::to_sparse).collect();
        let nf = blocks.len();
        let grid: Vec<Vec<Option<&SparseMatrix>>> = (0..nf)
            .map(|i| (0..nf).map(|j| (i == j).then_some(&blocks[i])).collect())
            .collect();
        SparseMatrix::block(&grid)
    }

    /// `y = 𝒜 x` block by block.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let off = self.offsets();
        y.iter_mut().for_each(|v| *v = 0.0);
        for (i, row) in self.blocks.iter().enumerate() {
            for (j, b) in row.iter().enumerate() {
                if let Some(b) = b {
                    b.mul_add(&x[off[j]..off[j + 1]], &mut y[off[i]..off[i + 1]]);
                }
            }
        }
    }
}

/// Tags the unit square sides: `gamma` (x = 0), `right`, `bottom`, `top`.
pub fn tag_unit_square(mesh: &Mesh2D) -> Result<Mesh2D> {
    const TOL: f64 = 1e-10;
    mesh.tag_boundary(&[
        TagRule::new("gamma", |p| p[0].abs() < TOL),
        TagRule::new("right", |p| (p[0] - 1.0).abs() < TOL),
        TagRule::new("bottom", |p| p[1].abs() < TOL),
        TagRule::new("top", |p| (p[1] - 1.0).abs() < TOL),
    ])
}

pub(crate) fn multiplier_block(space: &FunctionSpace, norm: SchurNorm) -> Result<NormBlock> {
    Ok(NormBlock::Multiplier(build_multiplier_norm(space, &norm.terms())?))
}
