//! Fractional Sobolev norm matrices on interface spaces.
//!
//! With interface mass `M` and stiffness `A`, the generalized eigenproblem
//! `(A + M) u = λ M u` gives `M`-orthonormal eigenvectors `U` and eigenvalues
//! `Λ ≥ 1`, and `H(s) = M U Λˢ Uᵀ M` is the discrete `Hˢ` norm matrix:
//! `H(0) = M`, `H(1) = A + M`, `H(−1) = M (A + M)⁻¹ M`.

use crate::error::{Error, Result};
use crate::fem::{assemble_mass, assemble_p0_interface_stiffness, assemble_stiffness, CellWeight, Family, FunctionSpace};
use crate::linalg::{dense_generalized_eig, DenseCholesky, DenseMatrix, SparseMatrix};

/// Boundary treatment of a fractional norm.
#[derive(Clone, Debug, PartialEq)]
pub enum HsBoundary {
    None,
    /// Drop these dofs before the eigensolve (the `H^s_00` variant).
    DirichletDofs(Vec<usize>),
}

/// Eigendecomposition of `(A + M, M)` on the kept dofs.
#[derive(Clone, Debug)]
pub struct FractionalNorm {
    m: DenseMatrix,
    a: DenseMatrix,
    lambda: Vec<f64>,
    u: DenseMatrix,
    /// `M U`, cached for building `H(s)`.
    mu: DenseMatrix,
    kept: Vec<usize>,
}

impl FractionalNorm {
    pub fn new(m: &DenseMatrix, a: &DenseMatrix, bc: &HsBoundary) -> Result<Self> {
        if m.shape() != a.shape() || m.nrows() != m.ncols() {
            return Err(Error::ShapeMismatch(format!(
                "mass {:?} and stiffness {:?} differ",
                m.shape(),
                a.shape()
            )));
        }
        let n = m.nrows();
        let kept: Vec<usize> = match bc {
            HsBoundary::None => (0..n).collect(),
            HsBoundary::DirichletDofs(drop) => (0..n).filter(|d| !drop.contains(d)).collect(),
        };
        if kept.is_empty() {
            return Err(Error::InvalidArgument("no dofs left after boundary conditions".into()));
        }
        let m = m.select(&kept, &kept);
        let a = a.select(&kept, &kept);
        let (lambda, u) = dense_generalized_eig(&a.add_scaled(&m, 1.0)?, &m)?;
        let mu = m.matmul(&u)?;
        Ok(FractionalNorm {
            m,
            a,
            lambda,
            u,
            mu,
            kept,
        })
    }

    pub fn from_sparse(m: &SparseMatrix, a: &SparseMatrix, bc: &HsBoundary) -> Result<Self> {
        Self::new(&m.to_dense(), &a.to_dense(), bc)
    }

    /// Mass and stiffness of an interface space: the P1 Laplacian, or the
    /// DG form for P0.
    pub fn for_space(space: &FunctionSpace, bc: &HsBoundary) -> Result<Self> {
        let (m, a) = interface_matrices(space)?;
        Self::from_sparse(&m, &a, bc)
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.lambda
    }

    pub fn eigenvectors(&self) -> &DenseMatrix {
        &self.u
    }

    pub fn mass(&self) -> &DenseMatrix {
        &self.m
    }

    pub fn stiffness(&self) -> &DenseMatrix {
        &self.a
    }

    /// Dofs of the original space the matrices are restricted to.
    pub fn kept_dofs(&self) -> &[usize] {
        &self.kept
    }

    /// `H(s) = M U Λˢ Uᵀ M`.
    pub fn matrix(&self, s: f64) -> DenseMatrix {
        let n = self.lambda.len();
        let pow: Vec<f64> = self.lambda.iter().map(|l| l.powf(s)).collect();
        let mut h = DenseMatrix::zeros(n, n);
        for i in 0..n {
            let wi = self.mu.row(i);
            for j in 0..=i {
                let wj = self.mu.row(j);
                let v: f64 = (0..n).map(|k| wi[k] * pow[k] * wj[k]).sum();
                h[(i, j)] = v;
                h[(j, i)] = v;
            }
        }
        h
    }
}

/// Interface mass and the stiffness used for fractional norms.
pub fn interface_matrices(space: &FunctionSpace) -> Result<(SparseMatrix, SparseMatrix)> {
    if space.interface_mesh().is_none() {
        return Err(Error::InvalidArgument("fractional norms live on interface spaces".into()));
    }
    let m = assemble_mass(space, CellWeight::None);
    let a = match space.family() {
        Family::P0 => assemble_p0_interface_stiffness(space)?,
        _ => assemble_stiffness(space, 1.0)?,
    };
    Ok((m, a))
}

pub fn build_hs(m: &DenseMatrix, a: &DenseMatrix, s: f64, bc: &HsBoundary) -> Result<DenseMatrix> {
    if !(-1.0..=1.0).contains(&s) {
        return Err(Error::InvalidArgument(format!("fractional order {s} outside [-1, 1]")));
    }
    Ok(FractionalNorm::new(m, a, bc)?.matrix(s))
}

/// `max |H(s) M⁻¹ H(−s) − M| / max |M|`.
pub fn hs_identity_check(m: &DenseMatrix, a: &DenseMatrix, s: f64) -> Result<f64> {
    let f = FractionalNorm::new(m, a, &HsBoundary::None)?;
    let (hp, hm) = (f.matrix(s), f.matrix(-s));
    let chol = f.m.cholesky()?;
    let n = m.nrows();
    let mut minv_hm = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let col = chol.solve(&hm.column(j));
        for i in 0..n {
            minv_hm[(i, j)] = col[i];
        }
    }
    let prod = hp.matmul(&minv_hm)?;
    Ok(prod.add_scaled(&f.m, -1.0)?.max_abs() / f.m.max_abs())
}

/// Ingredient of a multiplier norm.
#[derive(Clone, Debug, PartialEq)]
pub enum NormTerm {
    Mass,
    /// Mass weighted by the inverse cell length.
    MassHinv,
    /// `H(s)`; with `dirichlet_endpoints` the end points flagged on the
    /// interface (P1 only) are removed from the whole norm.
    Hs { s: f64, dirichlet_endpoints: bool },
}

impl NormTerm {
    pub fn hs(s: f64) -> Self {
        NormTerm::Hs {
            s,
            dirichlet_endpoints: false,
        }
    }
}

/// Weighted sum of norm terms on a multiplier space, with its Cholesky factor.
#[derive(Clone, Debug)]
pub struct MultiplierNorm {
    terms: Vec<(f64, NormTerm)>,
    matrix: DenseMatrix,
    chol: DenseCholesky,
    kept: Vec<usize>,
}

impl MultiplierNorm {
    pub fn terms(&self) -> &[(f64, NormTerm)] {
        &self.terms
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn cholesky(&self) -> &DenseCholesky {
        &self.chol
    }

    pub fn kept_dofs(&self) -> &[usize] {
        &self.kept
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        self.chol.solve(b)
    }
}

pub fn build_multiplier_norm(space: &FunctionSpace, terms: &[(f64, NormTerm)]) -> Result<MultiplierNorm> {
    if terms.is_empty() {
        return Err(Error::InvalidArgument("multiplier norm needs at least one term".into()));
    }
    if let Some((w, _)) = terms.iter().find(|(w, _)| !(*w > 0.0)) {
        return Err(Error::InvalidArgument(format!("norm weight {w} is not positive")));
    }
    let chain = space
        .interface_mesh()
        .ok_or_else(|| Error::InvalidArgument("multiplier norms live on interface spaces".into()))?;
    let n = space.dim();
    let wants_bc = terms
        .iter()
        .any(|(_, t)| matches!(t, NormTerm::Hs { dirichlet_endpoints: true, .. }));
    let dropped: Vec<usize> = if wants_bc && space.family() == Family::P1 {
        let flags = chain.endpoint_flags();
        let last = chain.num_points() - 1;
        [(flags[0], 0), (flags[1], last)]
            .into_iter()
            .filter_map(|(f, d)| f.then_some(d))
            .collect()
    } else {
        Vec::new()
    };
    let kept: Vec<usize> = (0..n).filter(|d| !dropped.contains(d)).collect();
    let bc = HsBoundary::DirichletDofs(dropped);
    let (m, a) = interface_matrices(space)?;
    let mut frac: Option<FractionalNorm> = None;
    let mut matrix = DenseMatrix::zeros(kept.len(), kept.len());
    for (w, term) in terms {
        let t = match term {
            NormTerm::Mass => m.to_dense().select(&kept, &kept),
            NormTerm::MassHinv => assemble_mass(space, CellWeight::InverseCellVolume)
                .to_dense()
                .select(&kept, &kept),
            NormTerm::Hs { s, .. } => {
                if !(-1.0..=1.0).contains(s) {
                    return Err(Error::InvalidArgument(format!("fractional order {s} outside [-1, 1]")));
                }
                if frac.is_none() {
                    frac = Some(FractionalNorm::from_sparse(&m, &a, &bc)?);
                }
                frac.as_ref().unwrap().matrix(*s)
            }
        };
        matrix = matrix.add_scaled(&t, *w)?;
    }
    let chol = matrix.cholesky()?;
    Ok(MultiplierNorm {
        terms: terms.to_vec(),
        matrix,
        chol,
        kept,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::mesh::InterfaceMesh1D;

    fn rel(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
        a.add_scaled(b, -1.0).unwrap().max_abs() / b.max_abs()
    }

    fn chain_space(n: usize, family: Family, jitter: bool) -> FunctionSpace {
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        let mut ys: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        if jitter {
            for y in &mut ys[1..n] {
                *y += rng.gen_range(-0.3..0.3) / n as f64;
            }
        }
        let chain = InterfaceMesh1D::from_points(ys.into_iter().map(|y| [0.0, y]).collect(), false).unwrap();
        FunctionSpace::on_interface(Arc::new(chain), family).unwrap()
    }

    fn dense_pair(space: &FunctionSpace) -> (DenseMatrix, DenseMatrix) {
        let (m, a) = interface_matrices(space).unwrap();
        (m.to_dense(), a.to_dense())
    }

    #[test]
    fn end_points_of_the_scale() {
        for family in [Family::P0, Family::P1] {
            let (m, a) = dense_pair(&chain_space(12, family, true));
            let f = FractionalNorm::new(&m, &a, &HsBoundary::None).unwrap();
            assert!(rel(&f.matrix(0.0), &m) < 1e-10);
            assert!(rel(&f.matrix(1.0), &a.add_scaled(&m, 1.0).unwrap()) < 1e-10);
            // H(−1) = M (A + M)⁻¹ M
            let chol = a.add_scaled(&m, 1.0).unwrap().cholesky().unwrap();
            let n = m.nrows();
            let mut hm1 = DenseMatrix::zeros(n, n);
            for j in 0..n {
                let x = chol.solve(&m.column(j));
                let mx = m.matvec(&x);
                for i in 0..n {
                    hm1[(i, j)] = mx[i];
                }
            }
            assert!(rel(&f.matrix(-1.0), &hm1) < 1e-10);
        }
    }

    #[test]
    fn scalar_case() {
        let (m, a) = (DenseMatrix::from_diagonal(&[0.5]), DenseMatrix::from_diagonal(&[1.5]));
        for s in [-1.0, -0.5, 0.0, 0.3, 1.0] {
            let h = build_hs(&m, &a, s, &HsBoundary::None).unwrap();
            let exact = 0.5 * ((1.5 + 0.5) / 0.5f64).powf(s);
            assert!((h[(0, 0)] - exact).abs() < 1e-14 * exact);
        }
        assert!(build_hs(&m, &a, 1.5, &HsBoundary::None).is_err());
    }

    #[test]
    fn eigen_invariants() {
        let (m, a) = dense_pair(&chain_space(20, Family::P1, true));
        let f = FractionalNorm::new(&m, &a, &HsBoundary::None).unwrap();
        let u = f.eigenvectors();
        let utmu = u.transpose().matmul(&m.matmul(u).unwrap()).unwrap();
        assert!(rel(&utmu, &DenseMatrix::identity(m.nrows())) < 1e-9);
        assert!(f.eigenvalues().iter().all(|&l| l >= 1.0 - 1e-9));
        let am = a.add_scaled(&m, 1.0).unwrap();
        let lhs = am.matmul(u).unwrap();
        let rhs = m.matmul(u).unwrap().matmul(&DenseMatrix::from_diagonal(f.eigenvalues())).unwrap();
        assert!(lhs.add_scaled(&rhs, -1.0).unwrap().max_abs() <= 1e-9 * lhs.max_abs());
    }

    #[test]
    fn duality_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for family in [Family::P0, Family::P1] {
            let (m, a) = dense_pair(&chain_space(16, family, true));
            assert!(hs_identity_check(&m, &a, 0.5).unwrap() <= 1e-8);
            assert!(hs_identity_check(&m, &a, 0.0).unwrap() <= 1e-12);
            assert!(hs_identity_check(&m, &a, 1.0).unwrap() <= 1e-8);
        }
        // random SPD pair
        let n = 10;
        let vals: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let g = DenseMatrix::from_fn(n, n, |i, j| vals[i * n + j]);
        let a = g.matmul(&g.transpose()).unwrap();
        let m = DenseMatrix::from_fn(n, n, |i, j| if i == j { 1.0 + i as f64 } else { 0.0 });
        assert!(hs_identity_check(&m, &a, 0.5).unwrap() <= 1e-8);
    }

    #[test]
    fn monotone_in_the_order() {
        let (m, a) = dense_pair(&chain_space(15, Family::P1, true));
        let f = FractionalNorm::new(&m, &a, &HsBoundary::None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let orders = [-1.0, -0.5, 0.0, 0.25, 0.5, 1.0];
        let hs: Vec<DenseMatrix> = orders.iter().map(|&s| f.matrix(s)).collect();
        for _ in 0..20 {
            let x: Vec<f64> = (0..m.nrows()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let q: Vec<f64> = hs.iter().map(|h| crate::linalg::dot(&x, &h.matvec(&x))).collect();
            for w in q.windows(2) {
                assert!(w[0] <= w[1] * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn dirichlet_endpoints_raise_the_bottom_of_the_spectrum() {
        let (m, a) = dense_pair(&chain_space(16, Family::P1, false));
        let n = m.nrows();
        let interior: Vec<usize> = (1..n - 1).collect();
        let free = FractionalNorm::new(&m, &a, &HsBoundary::None).unwrap();
        let pinned = FractionalNorm::new(&m, &a, &HsBoundary::DirichletDofs(vec![0, n - 1])).unwrap();
        assert_eq!(pinned.kept_dofs(), &interior[..]);
        // smallest eigenvalue of M⁻¹H(1) on the interior block vs. H_00(1)
        let lmin = |h: &DenseMatrix, m: &DenseMatrix| crate::linalg::dense_generalized_eigenvalues(h, m).unwrap()[0];
        let m_int = m.select(&interior, &interior);
        let h_free = free.matrix(1.0).select(&interior, &interior);
        let h_pinned = pinned.matrix(1.0);
        assert!(lmin(&h_pinned, &m_int) >= lmin(&h_free, &m_int) - 1e-12);
        assert!(pinned.eigenvalues()[0] > free.eigenvalues()[0] + 1.0);
    }

    #[test]
    fn multiplier_norms() {
        let space = chain_space(8, Family::P0, false);
        let (m, _) = dense_pair(&space);
        let n1 = build_multiplier_norm(&space, &[(1.0, NormTerm::Mass)]).unwrap();
        assert!(rel(n1.matrix(), &m) < 1e-15);

        let f = FractionalNorm::for_space(&space, &HsBoundary::None).unwrap();
        let naive = build_multiplier_norm(&space, &[(1.0, NormTerm::hs(-0.5)), (1.0, NormTerm::hs(0.5))]).unwrap();
        let expected = f.matrix(-0.5).add_scaled(&f.matrix(0.5), 1.0).unwrap();
        assert!(rel(naive.matrix(), &expected) < 1e-12);

        let (mu, k) = (1e-4, 10.0);
        let robust =
            build_multiplier_norm(&space, &[(1.0 / mu, NormTerm::hs(-0.5)), (k, NormTerm::MassHinv)]).unwrap();
        let expected = f
            .matrix(-0.5)
            .scaled(1.0 / mu)
            .add_scaled(&DenseMatrix::identity(8), k)
            .unwrap();
        assert!(rel(robust.matrix(), &expected) < 1e-12);

        assert!(build_multiplier_norm(&space, &[]).is_err());
        assert!(build_multiplier_norm(&space, &[(0.0, NormTerm::Mass)]).is_err());
    }
}
