use crate::error::{Error, Result};
use crate::linalg::{
    dense_generalized_eigenvalues, factorize, lanczos_extremes, DenseMatrix, FactorKind, LanczosOptions,
};
use crate::problems::{BlockSystem, NormBlock};

use super::BlockPreconditioner;

pub const DEFAULT_DENSE_CAP: usize = 12000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpectrumMethod {
    /// All eigenvalues of the pencil `(𝒜, N)`; refuses systems above `cap`.
    Dense { cap: usize },
    Iterative(LanczosOptions),
}

impl Default for SpectrumMethod {
    fn default() -> Self {
        SpectrumMethod::Dense { cap: DEFAULT_DENSE_CAP }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumReport {
    pub lambda_min_abs: f64,
    pub lambda_max_abs: f64,
    pub condition: f64,
    pub method: &'static str,
    /// `false` only for an iterative run that hit its iteration cap.
    pub converged: bool,
}

impl SpectrumReport {
    fn from_extremes(min: f64, max: f64, method: &'static str, converged: bool) -> Result<Self> {
        if !(min > 0.0) {
            return Err(Error::Singular { step: 0, pivot: min });
        }
        Ok(SpectrumReport {
            lambda_min_abs: min,
            lambda_max_abs: max,
            condition: max / min,
            method,
            converged,
        })
    }
}

/// `max|λ| / min|λ|` over the generalized eigenvalues of `𝒜 x = λ N x`.
pub fn condition_number(system: &BlockSystem, method: SpectrumMethod) -> Result<SpectrumReport> {
    match method {
        SpectrumMethod::Dense { cap } => {
            let size = system.dim();
            if size > cap {
                return Err(Error::DenseCapExceeded { size, cap });
            }
            let eigs = match reduced_spectrum(system)? {
                Some(e) => e,
                None => full_spectrum(system)?,
            };
            let (min, max) = abs_extremes(&eigs);
            SpectrumReport::from_extremes(min, max, "dense", true)
        }
        SpectrumMethod::Iterative(opts) => {
            let prec = BlockPreconditioner::new(system)?;
            let ext = lanczos_extremes(|x, y| system.apply(x, y), |r, z| prec.apply(r, z), system.dim(), opts)?;
            SpectrumReport::from_extremes(ext.lambda_min_abs, ext.lambda_max_abs, "iterative", ext.converged)
        }
    }
}

fn abs_extremes(eigs: &[f64]) -> (f64, f64) {
    eigs.iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), e| (lo.min(e.abs()), hi.max(e.abs())))
}

/// Generalized eigenvalues of the assembled dense pencil.
pub(crate) fn full_spectrum(system: &BlockSystem) -> Result<Vec<f64>> {
    let a = system.matrix()?.to_dense();
    let n = system.norm_matrix()?.to_dense();
    dense_generalized_eigenvalues(&a, &n)
}

/// When every primal norm block equals the primal diagonal block of `𝒜`
/// and the primal part is block diagonal, the pencil `[[P, Cᵀ], [C, 0]]`
/// against `diag(P, S)` has eigenvalue 1 with multiplicity `n − m` and the
/// roots of `λ² − λ − μ = 0` for each eigenvalue `μ` of `(C P⁻¹ Cᵀ, S)`.
/// Returns `None` when the structure does not hold or `C` has more rows
/// than columns.
pub(crate) fn reduced_spectrum(system: &BlockSystem) -> Result<Option<Vec<f64>>> {
    let np = system.num_primal;
    let nf = system.fields.len();
    for i in 0..np {
        for j in 0..np {
            let b = system.blocks[i][j].as_ref();
            let ok = if i == j {
                matches!((&system.norms[i], b), (NormBlock::Sparse(n), Some(a)) if n == a)
            } else {
                b.is_none()
            };
            if !ok {
                return Ok(None);
            }
        }
    }
    let off = system.offsets();
    let n = off[np];
    let m = off[nf] - n;
    if m == 0 || m > n {
        return Ok(None);
    }

    // Z = P⁻¹ Cᵀ column by column, primal block by primal block.
    let mut z = vec![vec![0.0; n]; m];
    for i in 0..np {
        let f = factorize(system.blocks[i][i].as_ref().unwrap(), FactorKind::Spd)?;
        for k in np..nf {
            let Some(ct) = system.blocks[i][k].as_ref() else { continue };
            let ct = ct.to_dense();
            for c in 0..ct.ncols() {
                let col = f.solve(&ct.column(c));
                z[off[k] - n + c][off[i]..off[i + 1]].copy_from_slice(&col);
            }
        }
    }
    // C Z, assembled from the constraint rows.
    let mut cz = DenseMatrix::zeros(m, m);
    for k in np..nf {
        for i in 0..np {
            let Some(c) = system.blocks[k][i].as_ref() else { continue };
            for (col, zc) in z.iter().enumerate() {
                let prod = c.spmv(&zc[off[i]..off[i + 1]])?;
                for (r, v) in prod.into_iter().enumerate() {
                    cz[(off[k] - n + r, col)] += v;
                }
            }
        }
    }
    let cz = cz.symmetrized();
    let mut s = DenseMatrix::zeros(m, m);
    for k in np..nf {
        let blk = system.norms[k].to_dense();
        let o = off[k] - n;
        for r in 0..blk.nrows() {
            for c in 0..blk.ncols() {
                s[(o + r, o + c)] = blk[(r, c)];
            }
        }
    }
    let mus = dense_generalized_eigenvalues(&cz, &s)?;
    let mut eigs = vec![1.0; n - m];
    for mu in mus {
        let root = (1.0 + 4.0 * mu).max(0.0).sqrt();
        eigs.push((1.0 + root) / 2.0);
        eigs.push((1.0 - root) / 2.0);
    }
    Ok(Some(eigs))
}
