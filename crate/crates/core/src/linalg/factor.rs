//! Direct sparse solvers: envelope Cholesky for SPD matrices and banded LU
//! with partial pivoting for symmetric indefinite ones, both after a reverse
//! Cuthill–McKee reordering.

use super::sparse::{reverse_cuthill_mckee, SparseMatrix};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorKind {
    Spd,
    SymmetricIndefinite,
}

/// A reusable factorization; `solve` takes `&self` and may be called from
/// several threads at once.
#[derive(Clone, Debug)]
pub struct Factorization {
    perm: Vec<usize>,
    inner: Inner,
}

#[derive(Clone, Debug)]
enum Inner {
    Envelope(EnvelopeCholesky),
    Band(BandLu),
}

pub fn factorize(a: &SparseMatrix, kind: FactorKind) -> Result<Factorization> {
    let (n, m) = a.shape();
    if n != m {
        return Err(Error::ShapeMismatch(format!("cannot factorize a {n}x{m} matrix")));
    }
    if !a.is_symmetric(1e-10) {
        return Err(Error::InvalidArgument("factorize expects a symmetric matrix".into()));
    }
    if let Some(i) = (0..n).find(|&i| a.row(i).all(|(_, v)| v == 0.0)) {
        return Err(Error::Singular { step: i, pivot: 0.0 });
    }
    let perm = reverse_cuthill_mckee(a);
    let b = a.permute_symmetric(&perm);
    let inner = match kind {
        FactorKind::Spd => Inner::Envelope(EnvelopeCholesky::new(&b)?),
        FactorKind::SymmetricIndefinite => Inner::Band(BandLu::new(&b)?),
    };
    Ok(Factorization { perm, inner })
}

impl Factorization {
    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; b.len()];
        self.solve_into(b, &mut x);
        x
    }

    pub fn solve_into(&self, b: &[f64], x: &mut [f64]) {
        assert_eq!(b.len(), self.perm.len(), "right-hand side has wrong length");
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        match &self.inner {
            Inner::Envelope(c) => c.solve_in_place(&mut y),
            Inner::Band(lu) => lu.solve_in_place(&mut y),
        }
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = y[k];
        }
    }

    /// Stored factor entries.
    pub fn fill(&self) -> usize {
        match &self.inner {
            Inner::Envelope(c) => c.values.len(),
            Inner::Band(lu) => lu.values.len(),
        }
    }
}

/// Row-oriented envelope (skyline) Cholesky: row `i` of `L` is stored densely
/// from its first structural nonzero up to the diagonal.
#[derive(Clone, Debug)]
struct EnvelopeCholesky {
    first: Vec<usize>,
    offset: Vec<usize>,
    values: Vec<f64>,
}

impl EnvelopeCholesky {
    fn new(a: &SparseMatrix) -> Result<Self> {
        let n = a.nrows();
        let first: Vec<usize> = (0..n)
            .map(|i| a.row(i).map(|(j, _)| j).filter(|&j| j <= i).min().unwrap_or(i))
            .collect();
        let mut offset = Vec::with_capacity(n + 1);
        offset.push(0);
        for i in 0..n {
            offset.push(offset[i] + i - first[i] + 1);
        }
        let mut values = vec![0.0; offset[n]];
        for i in 0..n {
            for (j, v) in a.row(i) {
                if j <= i {
                    values[offset[i] + j - first[i]] = v;
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            let (done, rest) = values.split_at_mut(offset[i]);
            let row_i = &mut rest[..i - fi + 1];
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let row_j = &done[offset[j]..offset[j + 1]];
                let dot: f64 = row_i[k0 - fi..j - fi]
                    .iter()
                    .zip(&row_j[k0 - fj..j - fj])
                    .map(|(x, y)| x * y)
                    .sum();
                row_i[j - fi] = (row_i[j - fi] - dot) / row_j[j - fj];
            }
            let diag = row_i[i - fi];
            let s = diag - row_i[..i - fi].iter().map(|x| x * x).sum::<f64>();
            if !(s > 1e-14 * diag.abs()) {
                return Err(Error::NotPositiveDefinite { step: i, pivot: s });
            }
            row_i[i - fi] = s.sqrt();
        }
        Ok(EnvelopeCholesky {
            first,
            offset,
            values,
        })
    }

    fn solve_in_place(&self, y: &mut [f64]) {
        let n = y.len();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.values[self.offset[i]..self.offset[i + 1]];
            let dot: f64 = row[..i - fi].iter().zip(&y[fi..i]).map(|(l, v)| l * v).sum();
            y[i] = (y[i] - dot) / row[i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.values[self.offset[i]..self.offset[i + 1]];
            y[i] /= row[i - fi];
            let yi = y[i];
            for (v, l) in y[fi..i].iter_mut().zip(&row[..i - fi]) {
                *v -= l * yi;
            }
        }
    }
}

/// Banded LU with partial pivoting. Row `i` stores columns `i-b ..= i+2b`.
#[derive(Clone, Debug)]
struct BandLu {
    n: usize,
    b: usize,
    values: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandLu {
    fn new(a: &SparseMatrix) -> Result<Self> {
        let n = a.nrows();
        let b = (0..n)
            .flat_map(|i| a.row(i).map(move |(j, _)| i.abs_diff(j)))
            .max()
            .unwrap_or(0);
        let width = 3 * b + 1;
        let mut lu = BandLu {
            n,
            b,
            values: vec![0.0; n * width],
            pivots: vec![0; n],
        };
        for i in 0..n {
            for (j, v) in a.row(i) {
                *lu.at(i, j) = v;
            }
        }
        let tiny = 1e-14 * a.max_abs();
        for k in 0..n {
            let last_row = (k + b).min(n - 1);
            let last_col = (k + 2 * b).min(n - 1);
            let p = (k..=last_row)
                .max_by(|&x, &y| lu.get(x, k).abs().total_cmp(&lu.get(y, k).abs()))
                .unwrap();
            let pivot = lu.get(p, k);
            if !(pivot.abs() > tiny) {
                return Err(Error::Singular { step: k, pivot });
            }
            lu.pivots[k] = p;
            if p != k {
                for c in k..=last_col {
                    let t = lu.get(k, c);
                    *lu.at(k, c) = lu.get(p, c);
                    *lu.at(p, c) = t;
                }
            }
            for i in k + 1..=last_row {
                let l = lu.get(i, k) / pivot;
                *lu.at(i, k) = l;
                if l != 0.0 {
                    for c in k + 1..=last_col {
                        let u = lu.get(k, c);
                        *lu.at(i, c) -= l * u;
                    }
                }
            }
        }
        Ok(lu)
    }

    #[inline]
    fn idx(&self, i: usize, c: usize) -> usize {
        debug_assert!(c + self.b >= i && c <= i + 2 * self.b);
        i * (3 * self.b + 1) + (c + self.b - i)
    }

    #[inline]
    fn get(&self, i: usize, c: usize) -> f64 {
        self.values[self.idx(i, c)]
    }

    #[inline]
    fn at(&mut self, i: usize, c: usize) -> &mut f64 {
        let k = self.idx(i, c);
        &mut self.values[k]
    }

    fn solve_in_place(&self, y: &mut [f64]) {
        let (n, b) = (self.n, self.b);
        for k in 0..n {
            y.swap(k, self.pivots[k]);
            let yk = y[k];
            for i in k + 1..=(k + b).min(n - 1) {
                y[i] -= self.get(i, k) * yk;
            }
        }
        for k in (0..n).rev() {
            let mut s = y[k];
            for c in k + 1..=(k + 2 * b).min(n - 1) {
                s -= self.get(k, c) * y[c];
            }
            y[k] = s / self.get(k, k);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::TripletBuilder;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn norm(v: &[f64]) -> f64 {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    fn residual(a: &SparseMatrix, x: &[f64], b: &[f64]) -> f64 {
        let ax = a.spmv(x).unwrap();
        norm(&ax.iter().zip(b).map(|(p, q)| p - q).collect::<Vec<_>>())
    }

    #[test]
    fn diagonal_solve() {
        let a = SparseMatrix::diagonal(&[1.0, 2.0, 3.0]);
        let f = factorize(&a, FactorKind::Spd).unwrap();
        assert!(f.solve(&[1.0, 2.0, 3.0]).iter().all(|x| (x - 1.0).abs() < 1e-15));
    }

    #[test]
    fn laplacian_first_column_of_inverse() {
        // inverse of tridiag(-1, 2, -1) for n = 4 is (min(i,j)(5-max(i,j)))/5
        let mut t = TripletBuilder::new(4, 4);
        for i in 0..4 {
            t.push(i, i, 2.0);
            if i > 0 {
                t.push(i, i - 1, -1.0);
                t.push(i - 1, i, -1.0);
            }
        }
        let a = t.build();
        let expected = [4.0 / 5.0, 3.0 / 5.0, 2.0 / 5.0, 1.0 / 5.0];
        for kind in [FactorKind::Spd, FactorKind::SymmetricIndefinite] {
            let x = factorize(&a, kind).unwrap().solve(&[1.0, 0.0, 0.0, 0.0]);
            for (p, q) in x.iter().zip(&expected) {
                assert!((p - q).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn permutation_matrix_indefinite() {
        let mut t = TripletBuilder::new(2, 2);
        t.push(0, 1, 1.0);
        t.push(1, 0, 1.0);
        let a = t.build();
        let x = factorize(&a, FactorKind::SymmetricIndefinite).unwrap().solve(&[1.0, 2.0]);
        assert_eq!(x, vec![2.0, 1.0]);
        assert!(matches!(factorize(&a, FactorKind::Spd), Err(Error::NotPositiveDefinite { .. })));
    }

    #[test]
    fn singular_matrices_rejected() {
        let mut t = TripletBuilder::new(2, 2);
        t.push(0, 0, 1.0);
        let a = t.build();
        assert!(matches!(factorize(&a, FactorKind::SymmetricIndefinite), Err(Error::Singular { .. })));
        let mut t = TripletBuilder::new(2, 2);
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            t.push(i, j, 1.0);
        }
        assert!(matches!(factorize(&t.build(), FactorKind::SymmetricIndefinite), Err(Error::Singular { .. })));
    }

    /// Diagonal of magnitude 20 (random signs when `indefinite`) plus sparse
    /// off-diagonal noise, so instances stay well conditioned.
    fn random_sparse_symmetric(n: usize, rng: &mut ChaCha8Rng, indefinite: bool) -> SparseMatrix {
        let mut t = TripletBuilder::new(n, n);
        for i in 0..n {
            let sign = if indefinite && rng.gen_bool(0.5) { -1.0 } else { 1.0 };
            t.push(i, i, sign * 20.0);
            for _ in 0..3 {
                let j = rng.gen_range(0..n);
                let v = rng.gen_range(-1.0..1.0);
                t.push(i, j, v);
                t.push(j, i, v);
            }
        }
        t.build()
    }

    #[test]
    fn random_spd_and_indefinite_solves() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for case in 0..100 {
            let n = rng.gen_range(1..=200);
            let spd = case % 2 == 0;
            let a = random_sparse_symmetric(n, &mut rng, !spd);
            let kind = if spd { FactorKind::Spd } else { FactorKind::SymmetricIndefinite };
            let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let x = factorize(&a, kind).unwrap().solve(&b);
            assert!(residual(&a, &x, &b) <= 1e-10 * norm(&b), "case {case} n={n}");
        }
    }
}
