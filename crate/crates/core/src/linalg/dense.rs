use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<f64>,
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.ncols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.ncols + j]
    }
}

impl DenseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        DenseMatrix {
            nrows,
            ncols,
            data: vec![0.0; nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn from_fn(nrows: usize, ncols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(nrows, ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        Ok(DenseMatrix {
            nrows: rows.len(),
            ncols,
            data: rows.concat(),
        })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nrows, self.ncols)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.nrows).map(|i| self[(i, j)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.nrows.min(self.ncols)).map(|i| self[(i, i)]).sum()
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.ncols, self.nrows, |i, j| self[(j, i)])
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols, "matvec shape mismatch");
        (0..self.nrows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.ncols != other.nrows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {:?} by {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let mut out = DenseMatrix::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let src = other.row(k);
                for (o, &b) in out.row_mut(i).iter_mut().zip(src) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self + alpha * other`.
    pub fn add_scaled(&self, other: &DenseMatrix, alpha: f64) -> Result<DenseMatrix> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch(format!(
                "cannot add {:?} and {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let mut out = self.clone();
        for (o, &b) in out.data.iter_mut().zip(&other.data) {
            *o += alpha * b;
        }
        Ok(out)
    }

    pub fn scaled(&self, alpha: f64) -> DenseMatrix {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= alpha);
        out
    }

    pub fn asymmetry(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.nrows {
            for j in 0..i {
                m = m.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        m
    }

    /// `(A + Aᵀ) / 2`.
    pub fn symmetrized(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.nrows, self.ncols, |i, j| 0.5 * (self[(i, j)] + self[(j, i)]))
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> DenseMatrix {
        DenseMatrix::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }

    pub fn cholesky(&self) -> Result<DenseCholesky> {
        DenseCholesky::new(self)
    }
}

/// `A = L Lᵀ` with `L` stored densely.
#[derive(Clone, Debug)]
pub struct DenseCholesky {
    l: DenseMatrix,
}

impl DenseCholesky {
    pub fn new(a: &DenseMatrix) -> Result<Self> {
        if a.nrows != a.ncols {
            return Err(Error::ShapeMismatch(format!("Cholesky of {:?} matrix", a.shape())));
        }
        let n = a.nrows;
        let mut l = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let dot: f64 = l.row(i)[..j].iter().zip(&l.row(j)[..j]).map(|(x, y)| x * y).sum();
                let v = a[(i, j)] - dot;
                if i == j {
                    if !(v > 0.0) {
                        return Err(Error::NotPositiveDefinite { step: i, pivot: v });
                    }
                    l[(i, i)] = v.sqrt();
                } else {
                    l[(i, j)] = v / l[(j, j)];
                }
            }
        }
        Ok(DenseCholesky { l })
    }

    pub fn l(&self) -> &DenseMatrix {
        &self.l
    }

    pub fn dim(&self) -> usize {
        self.l.nrows
    }

    /// Overwrites `b` with `L⁻¹ b`.
    pub fn solve_lower(&self, b: &mut [f64]) {
        for i in 0..b.len() {
            let row = self.l.row(i);
            let s: f64 = row[..i].iter().zip(&b[..i]).map(|(x, y)| x * y).sum();
            b[i] = (b[i] - s) / row[i];
        }
    }

    /// Overwrites `b` with `L⁻ᵀ b`.
    pub fn solve_upper(&self, b: &mut [f64]) {
        for i in (0..b.len()).rev() {
            b[i] /= self.l[(i, i)];
            let bi = b[i];
            for (k, bk) in b[..i].iter_mut().enumerate() {
                *bk -= self.l[(i, k)] * bi;
            }
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_lower(&mut x);
        self.solve_upper(&mut x);
        x
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a
/// symmetric matrix, by Householder tridiagonalization and implicit QL.
pub fn symmetric_eigen(a: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix)> {
    let (d, v) = tridiagonal_ql(a, true)?;
    Ok((d, v.unwrap()))
}

pub fn symmetric_eigenvalues(a: &DenseMatrix) -> Result<Vec<f64>> {
    Ok(tridiagonal_ql(a, false)?.0)
}

/// Solves `A v = λ B v` for symmetric `A` and SPD `B` through `B = L Lᵀ`.
/// Eigenvectors are returned as `B`-orthonormal columns.
pub fn dense_generalized_eig(a: &DenseMatrix, b: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix)> {
    let c = reduce_generalized(a, b)?;
    let (vals, q) = symmetric_eigen(&c.0)?;
    let chol = c.1;
    let n = a.nrows;
    let mut v = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut col = q.column(j);
        chol.solve_upper(&mut col);
        for i in 0..n {
            v[(i, j)] = col[i];
        }
    }
    Ok((vals, v))
}

/// Eigenvalues only of the pencil `(A, B)`.
pub fn dense_generalized_eigenvalues(a: &DenseMatrix, b: &DenseMatrix) -> Result<Vec<f64>> {
    symmetric_eigenvalues(&reduce_generalized(a, b)?.0)
}

fn reduce_generalized(a: &DenseMatrix, b: &DenseMatrix) -> Result<(DenseMatrix, DenseCholesky)> {
    if a.shape() != b.shape() || a.nrows != a.ncols {
        return Err(Error::ShapeMismatch(format!(
            "pencil of {:?} and {:?} matrices",
            a.shape(),
            b.shape()
        )));
    }
    let chol = b.cholesky()?;
    let n = a.nrows;
    // X = L⁻¹ A, then C = L⁻¹ Xᵀ = L⁻¹ A L⁻ᵀ
    let mut xt = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut col = a.column(j);
        chol.solve_lower(&mut col);
        xt.row_mut(j).copy_from_slice(&col);
    }
    let mut c = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut col = xt.column(j);
        chol.solve_lower(&mut col);
        for i in 0..n {
            c[(i, j)] = col[i];
        }
    }
    Ok((c.symmetrized(), chol))
}

fn tridiagonal_ql(a: &DenseMatrix, vectors: bool) -> Result<(Vec<f64>, Option<DenseMatrix>)> {
    if a.nrows != a.ncols {
        return Err(Error::ShapeMismatch(format!("eigenproblem of {:?} matrix", a.shape())));
    }
    if !a.is_finite() {
        return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
    }
    let n = a.nrows;
    if n == 0 {
        return Ok((Vec::new(), vectors.then(|| DenseMatrix::zeros(0, 0))));
    }
    let mut v = a.symmetrized();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut v, &mut d, &mut e);
    tql2(&mut v, &mut d, &mut e, vectors)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let vals = order.iter().map(|&i| d[i]).collect();
    let vecs = vectors.then(|| DenseMatrix::from_fn(n, n, |i, j| v[(i, order[j])]));
    Ok((vals, vecs))
}

// Householder reduction to tridiagonal form (after the EISPACK routine tred2).
fn tred2(v: &mut DenseMatrix, d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }
    for i in (1..n).rev() {
        let scale: f64 = d[..i].iter().map(|x| x.abs()).sum();
        let mut h = 0.0;
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
                v[(j, i)] = 0.0;
            }
        } else {
            for dk in &mut d[..i] {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            e[..i].iter_mut().for_each(|x| *x = 0.0);
            for j in 0..i {
                f = d[j];
                v[(j, i)] = f;
                g = e[j] + v[(j, j)] * f;
                for k in j + 1..i {
                    g += v[(k, j)] * d[k];
                    e[k] += v[(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                let (f, g) = (d[j], e[j]);
                for k in j..i {
                    v[(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..n - 1 {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let g: f64 = (0..=i).map(|k| v[(k, i + 1)] * v[(k, j)]).sum();
                for k in 0..=i {
                    v[(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = 0.0;
    }
    v[(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

// Implicit QL iterations on the tridiagonal matrix (after EISPACK tql2).
fn tql2(v: &mut DenseMatrix, d: &mut [f64], e: &mut [f64], vectors: bool) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::Breakdown(format!("QL iteration did not converge for eigenvalue {l}")));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in &mut d[l + 2..] {
                    *di -= h;
                }
                f += h;
                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if vectors {
                        for k in 0..n {
                            let h = v[(k, i + 1)];
                            v[(k, i + 1)] = s * v[(k, i)] + c * h;
                            v[(k, i)] = c * v[(k, i)] - s * h;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_spd(n: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
        let vals: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let g = DenseMatrix::from_fn(n, n, |i, j| vals[i * n + j]);
        g.matmul(&g.transpose()).unwrap().add_scaled(&DenseMatrix::identity(n), n as f64 * 0.1).unwrap()
    }

    fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
        let vals: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        DenseMatrix::from_fn(n, n, |i, j| vals[i * n + j]).symmetrized()
    }

    #[test]
    fn equal_pencil_has_unit_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = random_spd(6, &mut rng);
        let (vals, _) = dense_generalized_eig(&b, &b).unwrap();
        assert!(vals.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn diagonal_pencil() {
        let a = DenseMatrix::from_diagonal(&[1.0, 4.0]);
        let b = DenseMatrix::from_diagonal(&[1.0, 2.0]);
        let (vals, _) = dense_generalized_eig(&a, &b).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-15 && (vals[1] - 2.0).abs() < 1e-15);
    }

    /// Roots of det(A − λB) for 3×3 matrices by bisection on the cubic.
    fn cubic_roots(a: &DenseMatrix, b: &DenseMatrix) -> Vec<f64> {
        let det = |lam: f64| {
            let m = a.add_scaled(b, -lam).unwrap();
            m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
                - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
                + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)])
        };
        let mut roots = Vec::new();
        let grid: Vec<f64> = (0..=40000).map(|k| -100.0 + k as f64 * 0.005).collect();
        for w in grid.windows(2) {
            let (mut lo, mut hi) = (w[0], w[1]);
            if det(lo) * det(hi) > 0.0 {
                continue;
            }
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if det(lo) * det(mid) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        roots.dedup_by(|x, y| (*x - *y).abs() < 1e-9);
        roots
    }

    #[test]
    fn three_by_three_matches_characteristic_roots() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let a = random_symmetric(3, &mut rng);
            let b = random_spd(3, &mut rng);
            let (vals, _) = dense_generalized_eig(&a, &b).unwrap();
            let roots = cubic_roots(&a, &b);
            assert_eq!(roots.len(), 3, "{roots:?}");
            for (v, r) in vals.iter().zip(&roots) {
                assert!((v - r).abs() < 1e-9, "{v} vs {r}");
            }
        }
    }

    #[test]
    fn residuals_orthonormality_and_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1, 2, 5, 17, 50] {
            let a = random_symmetric(n, &mut rng);
            let b = random_spd(n, &mut rng);
            let (vals, v) = dense_generalized_eig(&a, &b).unwrap();
            let norm = |m: &DenseMatrix| m.max_abs() * n as f64;
            for j in 0..n {
                let x = v.column(j);
                let ax = a.matvec(&x);
                let bx = b.matvec(&x);
                let res: f64 = ax.iter().zip(&bx).map(|(p, q)| (p - vals[j] * q).powi(2)).sum::<f64>().sqrt();
                let xn: f64 = x.iter().map(|t| t * t).sum::<f64>().sqrt();
                assert!(res <= 1e-9 * (norm(&a) + vals[j].abs() * norm(&b)) * xn);
            }
            let vtbv = v.transpose().matmul(&b.matmul(&v).unwrap()).unwrap();
            assert!(vtbv.add_scaled(&DenseMatrix::identity(n), -1.0).unwrap().max_abs() < 1e-9);
            // trace(B⁻¹A)
            let chol = b.cholesky().unwrap();
            let tr: f64 = (0..n).map(|j| chol.solve(&a.column(j))[j]).sum();
            let sum: f64 = vals.iter().sum();
            assert!((sum - tr).abs() <= 1e-8 * tr.abs().max(1.0));
            let only = dense_generalized_eigenvalues(&a, &b).unwrap();
            for (p, q) in only.iter().zip(&vals) {
                assert!((p - q).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn non_spd_b_rejected() {
        let a = DenseMatrix::identity(2);
        let b = DenseMatrix::from_diagonal(&[1.0, -1.0]);
        assert!(matches!(
            dense_generalized_eig(&a, &b),
            Err(Error::NotPositiveDefinite { step: 1, .. })
        ));
    }

    #[test]
    fn cholesky_solves() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_spd(20, &mut rng);
        let b: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let x = a.cholesky().unwrap().solve(&b);
        let r = a.matvec(&x);
        for (p, q) in r.iter().zip(&b) {
            assert!((p - q).abs() < 1e-10);
        }
    }
}
