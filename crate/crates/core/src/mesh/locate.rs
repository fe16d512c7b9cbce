use super::{Mesh2D, Point};

/// Bucket grid over the mesh bounding box for point-in-cell queries.
pub struct CellLocator<'a> {
    mesh: &'a Mesh2D,
    origin: Point,
    cell_size: [f64; 2],
    dims: [usize; 2],
    buckets: Vec<Vec<usize>>,
}

const BARY_TOL: f64 = 1e-12;

impl<'a> CellLocator<'a> {
    pub fn new(mesh: &'a Mesh2D) -> Self {
        let (mut lo, mut hi) = ([f64::MAX; 2], [f64::MIN; 2]);
        for p in mesh.vertices() {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        let side = (mesh.num_cells() as f64).sqrt().ceil().max(1.0) as usize;
        let dims = [side, side];
        let cell_size = [
            ((hi[0] - lo[0]) / side as f64).max(f64::MIN_POSITIVE),
            ((hi[1] - lo[1]) / side as f64).max(f64::MIN_POSITIVE),
        ];
        let mut loc = CellLocator {
            mesh,
            origin: lo,
            cell_size,
            dims,
            buckets: vec![Vec::new(); side * side],
        };
        for c in 0..mesh.num_cells() {
            let pts = mesh.cell_points(c);
            let (mut a, mut b) = ([f64::MAX; 2], [f64::MIN; 2]);
            for p in pts {
                for d in 0..2 {
                    a[d] = a[d].min(p[d]);
                    b[d] = b[d].max(p[d]);
                }
            }
            let [i0, j0] = loc.bucket(a);
            let [i1, j1] = loc.bucket(b);
            for j in j0..=j1 {
                for i in i0..=i1 {
                    loc.buckets[j * dims[0] + i].push(c);
                }
            }
        }
        loc
    }

    fn bucket(&self, p: Point) -> [usize; 2] {
        let mut ij = [0; 2];
        for d in 0..2 {
            let t = ((p[d] - self.origin[d]) / self.cell_size[d]).floor();
            ij[d] = (t.max(0.0) as usize).min(self.dims[d] - 1);
        }
        ij
    }

    /// Returns the first cell containing `p` and its barycentric coordinates.
    pub fn locate(&self, p: Point) -> Option<(usize, [f64; 3])> {
        let [i, j] = self.bucket(p);
        self.buckets[j * self.dims[0] + i].iter().find_map(|&c| {
            let bary = barycentric(self.mesh.cell_points(c), p);
            bary.iter().all(|&l| l >= -BARY_TOL).then_some((c, bary))
        })
    }
}

pub fn barycentric(tri: [Point; 3], p: Point) -> [f64; 3] {
    let [a, b, c] = tri;
    let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
    let l1 = ((p[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (p[1] - a[1])) / det;
    let l2 = ((b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1])) / det;
    [1.0 - l1 - l2, l1, l2]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_crossed, Rect};

    #[test]
    fn locates_interior_and_boundary_points() {
        let mesh = generate_crossed(4, 4, Rect::UNIT).unwrap();
        let loc = CellLocator::new(&mesh);
        for &p in &[[0.1, 0.2], [0.0, 0.0], [1.0, 1.0], [0.5, 0.999], [0.3333, 0.77]] {
            let (c, bary) = loc.locate(p).expect("point inside");
            let pts = mesh.cell_points(c);
            let back = [
                bary[0] * pts[0][0] + bary[1] * pts[1][0] + bary[2] * pts[2][0],
                bary[0] * pts[0][1] + bary[1] * pts[1][1] + bary[2] * pts[2][1],
            ];
            assert!((back[0] - p[0]).abs() < 1e-14 && (back[1] - p[1]).abs() < 1e-14);
        }
        assert!(loc.locate([1.5, 0.5]).is_none());
    }
}
