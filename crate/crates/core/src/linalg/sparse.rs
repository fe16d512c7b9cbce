use std::collections::VecDeque;

use super::DenseMatrix;
use crate::error::{Error, Result};

/// Compressed sparse row matrix with sorted, unique column indices per row.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
    symmetric: bool,
}

/// Coordinate-format accumulator; duplicates are summed on [`build`](Self::build).
#[derive(Clone, Debug)]
pub struct TripletBuilder {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletBuilder {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        TripletBuilder {
            nrows,
            ncols,
            entries: Vec::new(),
        }
    }

    pub fn with_capacity(nrows: usize, ncols: usize, cap: usize) -> Self {
        TripletBuilder {
            nrows,
            ncols,
            entries: Vec::with_capacity(cap),
        }
    }

    #[inline]
    pub fn push(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.nrows && j < self.ncols, "({i}, {j}) out of bounds");
        self.entries.push((i, j, v));
    }

    pub fn build(mut self) -> SparseMatrix {
        // stable, so duplicates are summed in insertion order
        self.entries.sort_by_key(|&(i, j, _)| (i, j));
        let mut indptr = vec![0; self.nrows + 1];
        let mut indices = Vec::with_capacity(self.entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(self.entries.len());
        let mut last = None;
        for (i, j, v) in self.entries {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(j);
                values.push(v);
                indptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..self.nrows {
            indptr[i + 1] += indptr[i];
        }
        SparseMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            indptr,
            indices,
            values,
            symmetric: false,
        }
    }
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        TripletBuilder::new(nrows, ncols).build()
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(d: &[f64]) -> Self {
        SparseMatrix {
            nrows: d.len(),
            ncols: d.len(),
            indptr: (0..=d.len()).collect(),
            indices: (0..d.len()).collect(),
            values: d.to_vec(),
            symmetric: true,
        }
    }

    /// Keeps the nonzero entries of a dense matrix.
    pub fn from_dense(a: &DenseMatrix) -> Self {
        let mut t = TripletBuilder::new(a.nrows(), a.ncols());
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                if a[(i, j)] != 0.0 {
                    t.push(i, j, a[(i, j)]);
                }
            }
        }
        t.build()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                d[(i, j)] += v;
            }
        }
        d
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

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn indptr(&self) -> &[usize] {
        &self.indptr
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_marked_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.indptr[i]..self.indptr[i + 1];
        self.indices[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.indptr[i]..self.indptr[i + 1];
        match self.indices[r.clone()].binary_search(&j) {
            Ok(k) => self.values[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest `|A_ij - A_ji|`.
    pub fn asymmetry(&self) -> f64 {
        if self.nrows != self.ncols {
            return f64::INFINITY;
        }
        let t = self.transpose();
        self.add_scaled(&t, -1.0).map(|d| d.max_abs()).unwrap_or(f64::INFINITY)
    }

    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        self.nrows == self.ncols && self.asymmetry() <= rel_tol * self.max_abs()
    }

    /// Sets the symmetry flag after verifying `‖A−Aᵀ‖max ≤ 1e−12·‖A‖max`.
    pub fn mark_symmetric(mut self) -> Result<Self> {
        if !self.is_symmetric(1e-12) {
            return Err(Error::ShapeMismatch(format!(
                "matrix is not symmetric (asymmetry {:e}, max entry {:e})",
                self.asymmetry(),
                self.max_abs()
            )));
        }
        self.symmetric = true;
        Ok(self)
    }

    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.nrows];
        self.spmv_into(x, &mut y)?;
        Ok(y)
    }

    pub fn spmv_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        if x.len() != self.ncols || y.len() != self.nrows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} matrix applied to vector of length {} into {}",
                self.nrows,
                self.ncols,
                x.len(),
                y.len()
            )));
        }
        self.mul_unchecked(x, y);
        Ok(())
    }

    /// `y = A x` without shape checks.
    #[inline]
    pub fn mul_unchecked(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let r = self.indptr[i]..self.indptr[i + 1];
            *yi = self.indices[r.clone()]
                .iter()
                .zip(&self.values[r])
                .map(|(&j, &v)| v * x[j])
                .sum();
        }
    }

    /// `y += A x`.
    pub fn mul_add(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                *yi += v * x[j];
            }
        }
    }

    /// `y += Aᵀ x`.
    pub fn mul_transpose_add(&self, x: &[f64], y: &mut [f64]) {
        for (i, &xi) in x.iter().enumerate() {
            for (j, v) in self.row(i) {
                y[j] += v * xi;
            }
        }
    }

    /// `xᵀ A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        (0..self.nrows).map(|i| x[i] * self.row(i).map(|(j, v)| v * y[j]).sum::<f64>()).sum()
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut t = TripletBuilder::with_capacity(self.ncols, self.nrows, self.nnz());
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                t.push(j, i, v);
            }
        }
        let mut out = t.build();
        out.symmetric = self.symmetric;
        out
    }

    pub fn scaled(&self, alpha: f64) -> SparseMatrix {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= alpha);
        out
    }

    /// `self + alpha * other`.
    pub fn add_scaled(&self, other: &SparseMatrix, alpha: f64) -> Result<SparseMatrix> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch(format!(
                "cannot add {:?} and {:?} matrices",
                self.shape(),
                other.shape()
            )));
        }
        let mut t = TripletBuilder::with_capacity(self.nrows, self.ncols, self.nnz() + other.nnz());
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                t.push(i, j, v);
            }
            for (j, v) in other.row(i) {
                t.push(i, j, alpha * v);
            }
        }
        let mut out = t.build();
        out.symmetric = self.symmetric && other.symmetric;
        Ok(out)
    }

    /// Restriction to the given rows and columns (in the given order).
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> SparseMatrix {
        let mut col_map = vec![usize::MAX; self.ncols];
        for (k, &j) in cols.iter().enumerate() {
            col_map[j] = k;
        }
        let mut t = TripletBuilder::new(rows.len(), cols.len());
        for (ri, &i) in rows.iter().enumerate() {
            for (j, v) in self.row(i) {
                if col_map[j] != usize::MAX {
                    t.push(ri, col_map[j], v);
                }
            }
        }
        let mut out = t.build();
        out.symmetric = self.symmetric && rows == cols;
        out
    }

    /// Symmetric permutation `B[i][j] = A[perm[i]][perm[j]]`.
    pub fn permute_symmetric(&self, perm: &[usize]) -> SparseMatrix {
        self.select(perm, perm)
    }

    /// Assembles a block matrix; `None` blocks are zero. Row and column block
    /// sizes are taken from the first present block in each row / column.
    pub fn block(blocks: &[Vec<Option<&SparseMatrix>>]) -> Result<SparseMatrix> {
        let nb_r = blocks.len();
        let nb_c = blocks.first().map_or(0, Vec::len);
        let mut row_sizes = vec![None; nb_r];
        let mut col_sizes = vec![None; nb_c];
        for (bi, row) in blocks.iter().enumerate() {
            if row.len() != nb_c {
                return Err(Error::ShapeMismatch("ragged block grid".into()));
            }
            for (bj, b) in row.iter().enumerate() {
                if let Some(b) = b {
                    for (slot, size) in [(&mut row_sizes[bi], b.nrows), (&mut col_sizes[bj], b.ncols)] {
                        match *slot {
                            Some(s) if s != size => {
                                return Err(Error::ShapeMismatch(format!(
                                    "block ({bi}, {bj}) has inconsistent shape {:?}",
                                    b.shape()
                                )))
                            }
                            _ => *slot = Some(size),
                        }
                    }
                }
            }
        }
        let row_sizes: Vec<usize> = row_sizes
            .into_iter()
            .map(|s| s.ok_or_else(|| Error::ShapeMismatch("empty block row".into())))
            .collect::<Result<_>>()?;
        let col_sizes: Vec<usize> = col_sizes
            .into_iter()
            .map(|s| s.ok_or_else(|| Error::ShapeMismatch("empty block column".into())))
            .collect::<Result<_>>()?;
        let offsets = |s: &[usize]| {
            let mut o = vec![0];
            for &x in s {
                o.push(o.last().unwrap() + x);
            }
            o
        };
        let (ro, co) = (offsets(&row_sizes), offsets(&col_sizes));
        let nnz = blocks.iter().flatten().flatten().map(|b| b.nnz()).sum();
        let mut t = TripletBuilder::with_capacity(ro[nb_r], co[nb_c], nnz);
        for (bi, row) in blocks.iter().enumerate() {
            for (bj, b) in row.iter().enumerate() {
                if let Some(b) = b {
                    for i in 0..b.nrows {
                        for (j, v) in b.row(i) {
                            t.push(ro[bi] + i, co[bj] + j, v);
                        }
                    }
                }
            }
        }
        Ok(t.build())
    }

    /// Keeps entries with `|v| > tol`.
    pub fn pruned(&self, tol: f64) -> SparseMatrix {
        let mut t = TripletBuilder::with_capacity(self.nrows, self.ncols, self.nnz());
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                if v.abs() > tol {
                    t.push(i, j, v);
                }
            }
        }
        let mut out = t.build();
        out.symmetric = self.symmetric;
        out
    }
}

/// Reverse Cuthill–McKee ordering of the symmetrized sparsity graph.
/// Returns `perm` with `perm[new] = old`.
pub fn reverse_cuthill_mckee(a: &SparseMatrix) -> Vec<usize> {
    let n = a.nrows();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for (j, _) in a.row(i) {
            if i != j {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    while order.len() < n {
        // start each component from a pseudo-peripheral vertex
        let seed = (0..n)
            .filter(|&v| !visited[v])
            .min_by_key(|&v| (degree[v], v))
            .unwrap();
        let root = pseudo_peripheral(&adj, seed, &visited);
        visited[root] = true;
        queue.push_back(root);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adj[v].iter().copied().filter(|&w| !visited[w]).collect();
            next.sort_unstable_by_key(|&w| (degree[w], w));
            for w in next {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

fn pseudo_peripheral(adj: &[Vec<usize>], start: usize, blocked: &[bool]) -> usize {
    let bfs = |root: usize| {
        let mut depth = vec![usize::MAX; adj.len()];
        depth[root] = 0;
        let mut queue = VecDeque::from([root]);
        let mut last = root;
        while let Some(v) = queue.pop_front() {
            last = v;
            for &w in &adj[v] {
                if depth[w] == usize::MAX && !blocked[w] {
                    depth[w] = depth[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        // among the deepest vertices prefer the one of smallest degree
        let max_depth = depth[last];
        let far = (0..adj.len())
            .filter(|&v| depth[v] == max_depth)
            .min_by_key(|&v| (adj[v].len(), v))
            .unwrap();
        (far, max_depth)
    };
    let (mut root, mut ecc) = bfs(start);
    for _ in 0..8 {
        let (far, d) = bfs(root);
        if d <= ecc {
            break;
        }
        root = far;
        ecc = d;
    }
    root
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_product() {
        let x = vec![1.5, -2.0, 3.25];
        assert_eq!(SparseMatrix::identity(3).spmv(&x).unwrap(), x);
    }

    #[test]
    fn two_by_two_product() {
        let mut t = TripletBuilder::new(2, 2);
        t.push(0, 0, 2.0);
        t.push(0, 1, 1.0);
        t.push(1, 0, 1.0);
        t.push(1, 1, 1.0);
        t.push(1, 1, 2.0);
        let a = t.build();
        assert_eq!(a.spmv(&[1.0, 1.0]).unwrap(), vec![3.0, 4.0]);
        assert!(a.clone().mark_symmetric().is_ok());
    }

    #[test]
    fn random_product_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut t = TripletBuilder::new(50, 50);
        for _ in 0..400 {
            t.push(rng.gen_range(0..50), rng.gen_range(0..50), rng.gen_range(-1.0..1.0));
        }
        let a = t.build();
        let d = a.to_dense();
        let x: Vec<f64> = (0..50).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let ys = a.spmv(&x).unwrap();
        let yd = d.matvec(&x);
        for (s, d) in ys.iter().zip(&yd) {
            assert!((s - d).abs() <= 1e-13);
        }
        let at = a.transpose().to_dense();
        assert_eq!(at, d.transpose());
    }

    #[test]
    fn shape_mismatch_reported() {
        assert!(matches!(
            SparseMatrix::identity(3).spmv(&[1.0]),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn asymmetric_matrix_cannot_be_marked() {
        let mut t = TripletBuilder::new(2, 2);
        t.push(0, 1, 1.0);
        assert!(t.build().mark_symmetric().is_err());
    }

    #[test]
    fn block_assembly_and_select() {
        let a = SparseMatrix::identity(2);
        let mut t = TripletBuilder::new(1, 2);
        t.push(0, 1, 5.0);
        let b = t.build();
        let bt = b.transpose();
        let k = SparseMatrix::block(&[vec![Some(&a), Some(&bt)], vec![Some(&b), None]]).unwrap();
        assert_eq!(k.shape(), (3, 3));
        assert_eq!(k.get(2, 1), 5.0);
        assert_eq!(k.get(1, 2), 5.0);
        assert!(k.is_symmetric(0.0));
        let s = k.select(&[1, 2], &[1, 2]);
        assert_eq!(s.to_dense()[(0, 1)], 5.0);
    }

    #[test]
    fn rcm_is_a_permutation_and_reduces_bandwidth() {
        // path graph numbered badly
        let n = 40;
        let label: Vec<usize> = (0..n).map(|i| (i * 17) % n).collect();
        let mut t = TripletBuilder::new(n, n);
        for i in 0..n {
            t.push(label[i], label[i], 2.0);
            if i + 1 < n {
                t.push(label[i], label[i + 1], -1.0);
                t.push(label[i + 1], label[i], -1.0);
            }
        }
        let a = t.build();
        let perm = reverse_cuthill_mckee(&a);
        let mut seen = perm.clone();
        seen.sort_unstable();
        assert_eq!(seen, (0..n).collect::<Vec<_>>());
        let b = a.permute_symmetric(&perm);
        let bw = (0..n).flat_map(|i| b.row(i).map(move |(j, _)| i.abs_diff(j))).max().unwrap();
        assert_eq!(bw, 1);
    }
}
