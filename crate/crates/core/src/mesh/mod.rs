//! Triangular meshes of planar domains and the 1D interface meshes cut out of them.
//!
//! A [`Mesh2D`] owns its vertex coordinates, counterclockwise cells, an optional
//! region label per cell and one tag per boundary edge. Edge connectivity is
//! derived once at construction and is immutable afterwards.

mod interface;
mod io;
mod locate;

pub use interface::{extract_interface, InterfaceMesh1D, InterfaceSelector};
pub use io::{read_mesh, write_mesh};
pub use locate::{barycentric, CellLocator};

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Tag given to boundary edges that no rule has classified yet.
pub const DEFAULT_BOUNDARY_TAG: &str = "boundary";

const DUPLICATE_TOL: f64 = 1e-12;

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub const UNIT: Rect = Rect {
        x0: 0.0,
        x1: 1.0,
        y0: 0.0,
        y1: 1.0,
    };

    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Rect { x0, x1, y0, y1 }
    }
}

/// Sorted vertex pair identifying an edge.
pub type EdgeKey = [usize; 2];

#[inline]
pub fn edge_key(a: usize, b: usize) -> EdgeKey {
    if a < b {
        [a, b]
    } else {
        [b, a]
    }
}

#[derive(Clone, Debug)]
pub struct Mesh2D {
    vertices: Vec<Point>,
    cells: Vec<[usize; 3]>,
    regions: Vec<Option<String>>,
    facet_tags: BTreeMap<EdgeKey, String>,
    edges: Vec<EdgeKey>,
    edge_index: HashMap<EdgeKey, usize>,
    /// Local edge `k` joins local vertices `k` and `(k + 1) % 3`.
    cell_edges: Vec<[usize; 3]>,
    edge_cells: Vec<(usize, Option<usize>)>,
}

/// A boundary classification rule: edges whose both endpoints satisfy the
/// predicate receive the tag. Rules are tried in order.
pub struct TagRule<'a> {
    pub tag: String,
    pub predicate: Box<dyn Fn(Point) -> bool + 'a>,
}

impl<'a> TagRule<'a> {
    pub fn new(tag: &str, predicate: impl Fn(Point) -> bool + 'a) -> Self {
        TagRule {
            tag: tag.to_string(),
            predicate: Box::new(predicate),
        }
    }

    /// Rule matching every edge.
    pub fn otherwise(tag: &str) -> Self {
        TagRule::new(tag, |_| true)
    }
}

impl Mesh2D {
    /// Builds a mesh and tags every boundary edge with [`DEFAULT_BOUNDARY_TAG`].
    pub fn new(
        vertices: Vec<Point>,
        cells: Vec<[usize; 3]>,
        regions: Option<Vec<Option<String>>>,
    ) -> Result<Self> {
        let mut mesh = Self::build(vertices, cells, regions)?;
        let tags = mesh
            .boundary_edges()
            .map(|e| (mesh.edges[e], DEFAULT_BOUNDARY_TAG.to_string()))
            .collect();
        mesh.facet_tags = tags;
        Ok(mesh)
    }

    /// Builds a mesh from explicit boundary tags; every boundary edge must be
    /// tagged exactly once and interior edges must not be tagged.
    pub fn from_parts(
        vertices: Vec<Point>,
        cells: Vec<[usize; 3]>,
        regions: Option<Vec<Option<String>>>,
        tags: Vec<(usize, usize, String)>,
    ) -> Result<Self> {
        let mut mesh = Self::build(vertices, cells, regions)?;
        let mut facet_tags = BTreeMap::new();
        for (a, b, tag) in tags {
            let key = edge_key(a, b);
            let Some(&e) = mesh.edge_index.get(&key) else {
                return Err(Error::InvalidMesh(format!("tagged edge ({a}, {b}) is not a mesh edge")));
            };
            if mesh.edge_cells[e].1.is_some() {
                return Err(Error::InvalidMesh(format!("tagged edge ({a}, {b}) is interior")));
            }
            if facet_tags.insert(key, tag).is_some() {
                return Err(Error::InvalidMesh(format!("edge ({a}, {b}) tagged twice")));
            }
        }
        if let Some(e) = mesh.boundary_edges().find(|&e| !facet_tags.contains_key(&mesh.edges[e])) {
            let [a, b] = mesh.edges[e];
            return Err(Error::UncoveredBoundaryEdge(a, b));
        }
        mesh.facet_tags = facet_tags;
        Ok(mesh)
    }

    fn build(
        vertices: Vec<Point>,
        cells: Vec<[usize; 3]>,
        regions: Option<Vec<Option<String>>>,
    ) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::InvalidMesh("mesh has no cells".into()));
        }
        let nv = vertices.len();
        for (c, cell) in cells.iter().enumerate() {
            if let Some(&v) = cell.iter().find(|&&v| v >= nv) {
                return Err(Error::InvalidMesh(format!(
                    "cell {c} references vertex {v} but the mesh has {nv} vertices"
                )));
            }
            let area = signed_area(vertices[cell[0]], vertices[cell[1]], vertices[cell[2]]);
            if !(area > 0.0) {
                return Err(Error::InvalidMesh(format!("cell {c} has non-positive area {area}")));
            }
        }
        if vertices.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(Error::InvalidMesh("non-finite vertex coordinate".into()));
        }
        check_duplicates(&vertices)?;
        let regions = match regions {
            Some(r) if r.len() != cells.len() => {
                return Err(Error::InvalidMesh(format!(
                    "{} region labels for {} cells",
                    r.len(),
                    cells.len()
                )))
            }
            Some(r) => r,
            None => vec![None; cells.len()],
        };

        let mut edges = Vec::new();
        let mut edge_index = HashMap::with_capacity(cells.len() * 2);
        let mut edge_cells: Vec<(usize, Option<usize>)> = Vec::new();
        let mut cell_edges = Vec::with_capacity(cells.len());
        for (c, cell) in cells.iter().enumerate() {
            let mut local = [0usize; 3];
            for k in 0..3 {
                let key = edge_key(cell[k], cell[(k + 1) % 3]);
                let e = match edge_index.get(&key) {
                    Some(&e) => {
                        let slot: &mut (usize, Option<usize>) = &mut edge_cells[e];
                        if slot.1.is_some() {
                            return Err(Error::InvalidMesh(format!(
                                "edge ({}, {}) shared by more than two cells",
                                key[0], key[1]
                            )));
                        }
                        slot.1 = Some(c);
                        e
                    }
                    None => {
                        let e = edges.len();
                        edges.push(key);
                        edge_index.insert(key, e);
                        edge_cells.push((c, None));
                        e
                    }
                };
                local[k] = e;
            }
            cell_edges.push(local);
        }

        Ok(Mesh2D {
            vertices,
            cells,
            regions,
            facet_tags: BTreeMap::new(),
            edges,
            edge_index,
            cell_edges,
            edge_cells,
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn cells(&self) -> &[[usize; 3]] {
        &self.cells
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[EdgeKey] {
        &self.edges
    }

    pub fn cell_edges(&self, cell: usize) -> [usize; 3] {
        self.cell_edges[cell]
    }

    /// Cells adjacent to edge `e`; the second entry is `None` on the boundary.
    pub fn edge_cells(&self, e: usize) -> (usize, Option<usize>) {
        self.edge_cells[e]
    }

    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_index.get(&edge_key(a, b)).copied()
    }

    pub fn region(&self, cell: usize) -> Option<&str> {
        self.regions[cell].as_deref()
    }

    pub fn regions(&self) -> &[Option<String>] {
        &self.regions
    }

    pub fn facet_tags(&self) -> &BTreeMap<EdgeKey, String> {
        &self.facet_tags
    }

    pub fn edge_tag(&self, e: usize) -> Option<&str> {
        self.facet_tags.get(&self.edges[e]).map(String::as_str)
    }

    pub fn has_tag(&self, tag: &str) -> bool {
        self.facet_tags.values().any(|t| t == tag)
    }

    /// Indices of edges incident to exactly one cell, in edge order.
    pub fn boundary_edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.edges.len()).filter(move |&e| self.edge_cells[e].1.is_none())
    }

    /// Edge indices carrying `tag`.
    pub fn tagged_edges<'a>(&'a self, tag: &'a str) -> impl Iterator<Item = usize> + 'a {
        self.boundary_edges().filter(move |&e| self.edge_tag(e) == Some(tag))
    }

    pub fn cell_points(&self, cell: usize) -> [Point; 3] {
        let [a, b, c] = self.cells[cell];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn cell_area(&self, cell: usize) -> f64 {
        let [a, b, c] = self.cell_points(cell);
        signed_area(a, b, c)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.cells.len()).map(|c| self.cell_area(c)).sum()
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let [a, b] = self.edges[e];
        distance(self.vertices[a], self.vertices[b])
    }

    pub fn edge_midpoint(&self, e: usize) -> Point {
        let [a, b] = self.edges[e];
        midpoint(self.vertices[a], self.vertices[b])
    }

    /// Largest edge length.
    pub fn max_edge_length(&self) -> f64 {
        (0..self.edges.len()).map(|e| self.edge_length(e)).fold(0.0, f64::max)
    }

    /// Outward unit normal of boundary edge `e` relative to its single cell.
    pub fn boundary_normal(&self, e: usize) -> Point {
        let (c, _) = self.edge_cells[e];
        self.outward_normal(c, e)
    }

    /// Unit normal of edge `e` pointing out of `cell`.
    pub fn outward_normal(&self, cell: usize, e: usize) -> Point {
        let k = self.cell_edges[cell]
            .iter()
            .position(|&x| x == e)
            .expect("edge does not belong to cell");
        let cell_v = self.cells[cell];
        let p = self.vertices[cell_v[k]];
        let q = self.vertices[cell_v[(k + 1) % 3]];
        // counterclockwise cells: the outward normal is the tangent rotated clockwise
        let len = distance(p, q);
        [(q[1] - p[1]) / len, -(q[0] - p[0]) / len]
    }

    /// Finds the vertex at `p` (within `tol`) among the boundary vertices.
    pub fn find_boundary_vertex(&self, p: Point, tol: f64) -> Option<usize> {
        self.boundary_edges()
            .flat_map(|e| self.edges[e])
            .find(|&v| distance(self.vertices[v], p) <= tol)
    }

    /// Locates the edge with endpoints at coordinates `p`, `q` and returns
    /// `(edge, owning cell)`; the owning cell is the one whose region matches
    /// `region` when given, else the first adjacent cell.
    pub fn locate_edge(&self, p: Point, q: Point, tol: f64) -> Option<usize> {
        let a = self.find_vertex(p, tol)?;
        let b = self.find_vertex(q, tol)?;
        self.edge_id(a, b)
    }

    /// Linear search for a vertex at `p`.
    pub fn find_vertex(&self, p: Point, tol: f64) -> Option<usize> {
        self.vertices.iter().position(|&v| distance(v, p) <= tol)
    }

    /// Returns a copy with the boundary retagged by the first matching rule.
    pub fn tag_boundary(&self, rules: &[TagRule<'_>]) -> Result<Mesh2D> {
        let mut tags = BTreeMap::new();
        for e in self.boundary_edges() {
            let [a, b] = self.edges[e];
            let (pa, pb) = (self.vertices[a], self.vertices[b]);
            let rule = rules
                .iter()
                .find(|r| (r.predicate)(pa) && (r.predicate)(pb))
                .ok_or(Error::UncoveredBoundaryEdge(a, b))?;
            tags.insert(self.edges[e], rule.tag.clone());
        }
        let mut mesh = self.clone();
        mesh.facet_tags = tags;
        Ok(mesh)
    }

    /// Splits every triangle into four through its edge midpoints. The new
    /// vertex of edge `e` gets index `num_vertices() + e`.
    pub fn refine_uniform(&self) -> Mesh2D {
        let nv = self.vertices.len();
        let mut vertices = self.vertices.clone();
        vertices.extend((0..self.edges.len()).map(|e| self.edge_midpoint(e)));
        let mut cells = Vec::with_capacity(4 * self.cells.len());
        let mut regions = Vec::with_capacity(4 * self.cells.len());
        for (c, &[v0, v1, v2]) in self.cells.iter().enumerate() {
            let [e01, e12, e20] = self.cell_edges[c];
            let (m01, m12, m20) = (nv + e01, nv + e12, nv + e20);
            cells.push([v0, m01, m20]);
            cells.push([m01, v1, m12]);
            cells.push([m20, m12, v2]);
            cells.push([m01, m12, m20]);
            for _ in 0..4 {
                regions.push(self.regions[c].clone());
            }
        }
        let mut tags = Vec::with_capacity(2 * self.facet_tags.len());
        for (key, tag) in &self.facet_tags {
            let m = nv + self.edge_index[key];
            tags.push((key[0], m, tag.clone()));
            tags.push((m, key[1], tag.clone()));
        }
        Mesh2D::from_parts(vertices, cells, Some(regions), tags)
            .expect("refinement of a valid mesh is valid")
    }

    /// Extracts the cells labelled `region` as a standalone mesh. Boundary
    /// edges of the submesh that were interior in `self` get `cut_tag`.
    /// Returns the submesh and, per submesh vertex, its index in `self`.
    pub fn submesh(&self, region: &str, cut_tag: &str) -> Result<(Mesh2D, Vec<usize>)> {
        let selected: Vec<usize> =
            (0..self.cells.len()).filter(|&c| self.region(c) == Some(region)).collect();
        if selected.is_empty() {
            return Err(Error::InvalidMesh(format!("no cells in region `{region}`")));
        }
        let mut local = vec![usize::MAX; self.vertices.len()];
        let mut parent = Vec::new();
        let mut cells = Vec::with_capacity(selected.len());
        for &c in &selected {
            let mut cell = [0; 3];
            for (k, &v) in self.cells[c].iter().enumerate() {
                if local[v] == usize::MAX {
                    local[v] = parent.len();
                    parent.push(v);
                }
                cell[k] = local[v];
            }
            cells.push(cell);
        }
        let vertices = parent.iter().map(|&v| self.vertices[v]).collect();
        let regions = selected.iter().map(|&c| self.regions[c].clone()).collect();
        let mut sub = Mesh2D::build(vertices, cells, Some(regions))?;
        let mut tags = BTreeMap::new();
        for e in sub.boundary_edges() {
            let [a, b] = sub.edges[e];
            let key = edge_key(parent[a], parent[b]);
            let tag = self
                .facet_tags
                .get(&key)
                .cloned()
                .unwrap_or_else(|| cut_tag.to_string());
            tags.insert(sub.edges[e], tag);
        }
        sub.facet_tags = tags;
        Ok((sub, parent))
    }

    /// Assigns a region label to each cell from its centroid.
    pub fn with_regions(&self, label: impl Fn(Point) -> Option<String>) -> Mesh2D {
        let mut mesh = self.clone();
        mesh.regions = (0..self.cells.len())
            .map(|c| {
                let [a, b, d] = self.cell_points(c);
                label([(a[0] + b[0] + d[0]) / 3.0, (a[1] + b[1] + d[1]) / 3.0])
            })
            .collect();
        mesh
    }
}

/// Crossed mesh of `nx * ny` squares, each cut by both diagonals into four
/// isosceles triangles around an added center vertex. Grid vertex `(i, j)`
/// has index `j * (nx + 1) + i`; square centers follow the grid vertices.
pub fn generate_crossed(nx: usize, ny: usize, bounds: Rect) -> Result<Mesh2D> {
    if nx == 0 || ny == 0 {
        return Err(Error::InvalidArgument(format!(
            "subdivision counts must be positive, got {nx} x {ny}"
        )));
    }
    if !(bounds.x1 > bounds.x0 && bounds.y1 > bounds.y0) {
        return Err(Error::InvalidArgument(format!("degenerate rectangle {bounds:?}")));
    }
    let hx = (bounds.x1 - bounds.x0) / nx as f64;
    let hy = (bounds.y1 - bounds.y0) / ny as f64;
    let coord = |i: usize, n: usize, lo: f64, hi: f64, h: f64| {
        if i == n {
            hi
        } else {
            lo + i as f64 * h
        }
    };
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1) + nx * ny);
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push([
                coord(i, nx, bounds.x0, bounds.x1, hx),
                coord(j, ny, bounds.y0, bounds.y1, hy),
            ]);
        }
    }
    let grid = |i: usize, j: usize| j * (nx + 1) + i;
    let center0 = vertices.len();
    for j in 0..ny {
        for i in 0..nx {
            let (a, c) = (vertices[grid(i, j)], vertices[grid(i + 1, j + 1)]);
            vertices.push(midpoint(a, c));
        }
    }
    let mut cells = Vec::with_capacity(4 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let m = center0 + j * nx + i;
            let (a, b, c, d) = (grid(i, j), grid(i + 1, j), grid(i + 1, j + 1), grid(i, j + 1));
            cells.push([a, b, m]);
            cells.push([b, c, m]);
            cells.push([c, d, m]);
            cells.push([d, a, m]);
        }
    }
    Mesh2D::new(vertices, cells, None)
}

pub fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

#[inline]
pub fn distance(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

#[inline]
pub fn midpoint(a: Point, b: Point) -> Point {
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
}

fn check_duplicates(vertices: &[Point]) -> Result<()> {
    let mut order: Vec<usize> = (0..vertices.len()).collect();
    order.sort_by(|&a, &b| vertices[a][0].total_cmp(&vertices[b][0]));
    for (k, &i) in order.iter().enumerate() {
        for &j in &order[k + 1..] {
            if vertices[j][0] - vertices[i][0] > DUPLICATE_TOL {
                break;
            }
            if (vertices[j][1] - vertices[i][1]).abs() <= DUPLICATE_TOL {
                return Err(Error::InvalidMesh(format!("vertices {i} and {j} coincide")));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_isosceles(mesh: &Mesh2D, c: usize) -> bool {
        let [a, b, d] = mesh.cell_points(c);
        let l = [distance(a, b), distance(b, d), distance(d, a)];
        (l[0] - l[1]).abs() < 1e-12 || (l[1] - l[2]).abs() < 1e-12 || (l[2] - l[0]).abs() < 1e-12
    }

    #[test]
    fn crossed_single_square() {
        let mesh = generate_crossed(1, 1, Rect::UNIT).unwrap();
        assert_eq!(mesh.num_vertices(), 5);
        assert_eq!(mesh.num_cells(), 4);
        for c in 0..4 {
            assert!((mesh.cell_area(c) - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn crossed_counts_and_area() {
        for n in 1..6 {
            let mesh = generate_crossed(n, n, Rect::UNIT).unwrap();
            assert_eq!(mesh.num_cells(), 4 * n * n);
        }
        let mesh = generate_crossed(2, 1, Rect::new(0.0, 2.0, 0.0, 1.0)).unwrap();
        assert_eq!(mesh.num_vertices(), 8);
        assert_eq!(mesh.num_cells(), 8);
        assert!((mesh.total_area() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn crossed_cells_are_equal_isosceles() {
        let mesh = generate_crossed(5, 5, Rect::UNIT).unwrap();
        let areas: Vec<f64> = (0..mesh.num_cells()).map(|c| mesh.cell_area(c)).collect();
        let (lo, hi) = areas
            .iter()
            .fold((f64::MAX, 0.0f64), |(lo, hi), &a| (lo.min(a), hi.max(a)));
        assert!((hi / lo - 1.0).abs() < 1e-12);
        assert!((0..mesh.num_cells()).all(|c| is_isosceles(&mesh, c)));
    }

    #[test]
    fn zero_subdivisions_rejected() {
        assert!(generate_crossed(0, 3, Rect::UNIT).is_err());
        assert!(generate_crossed(2, 2, Rect::new(0.0, 0.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn refinement_quadruples_and_preserves_area() {
        let mesh = generate_crossed(1, 1, Rect::UNIT).unwrap();
        let fine = mesh.refine_uniform();
        assert_eq!(fine.num_cells(), 16);
        assert!((fine.total_area() - 1.0).abs() < 1e-12);
        let twice = fine.refine_uniform();
        assert_eq!(twice.num_cells(), 16 * mesh.num_cells());
        // tags inherited by children
        assert_eq!(fine.facet_tags().len(), 2 * mesh.facet_tags().len());
    }

    #[test]
    fn refined_crossed_matches_finer_crossed_vertex_set() {
        let n = 3;
        let refined = generate_crossed(n, n, Rect::UNIT).unwrap().refine_uniform();
        let fine = generate_crossed(2 * n, 2 * n, Rect::UNIT).unwrap();
        assert_eq!(refined.num_cells(), fine.num_cells());
        assert_eq!(refined.num_vertices(), fine.num_vertices());
        for &p in refined.vertices() {
            assert!(fine.find_vertex(p, 1e-12).is_some(), "{p:?} missing");
        }
    }

    #[test]
    fn every_boundary_edge_tagged() {
        let mesh = generate_crossed(3, 2, Rect::UNIT).unwrap();
        let nb = mesh.boundary_edges().count();
        assert_eq!(nb, 2 * (3 + 2));
        assert_eq!(mesh.facet_tags().len(), nb);
    }

    #[test]
    fn first_matching_rule_wins() {
        let mesh = generate_crossed(2, 2, Rect::UNIT).unwrap();
        let tagged = mesh
            .tag_boundary(&[
                TagRule::new("gamma", |p| p[0].abs() < 1e-12),
                TagRule::otherwise("dirichlet"),
            ])
            .unwrap();
        let gamma: Vec<usize> = tagged.tagged_edges("gamma").collect();
        assert_eq!(gamma.len(), 2);
        for e in gamma {
            assert!(tagged.edge_midpoint(e)[0].abs() < 1e-15);
        }
        assert_eq!(tagged.tagged_edges("dirichlet").count(), 6);
    }

    #[test]
    fn darcy_stokes_tagging_leaves_interface_untagged() {
        let mesh = generate_crossed(4, 2, Rect::new(0.0, 2.0, 0.0, 1.0)).unwrap();
        let tagged = mesh
            .tag_boundary(&[
                TagRule::new("f_dirichlet", |p| p[0].abs() < 1e-12),
                TagRule::new("p_dirichlet", |p| (p[0] - 2.0).abs() < 1e-12),
                TagRule::new("neumann", |p| p[1].abs() < 1e-12 || (p[1] - 1.0).abs() < 1e-12),
            ])
            .unwrap();
        assert_eq!(tagged.tagged_edges("f_dirichlet").count(), 2);
        assert_eq!(tagged.tagged_edges("p_dirichlet").count(), 2);
        assert_eq!(tagged.tagged_edges("neumann").count(), 8);
        // no tagged edge lies on x = 1
        assert!(tagged
            .facet_tags()
            .keys()
            .all(|&[a, b]| (tagged.vertices()[a][0] - 1.0).abs() > 1e-12
                || (tagged.vertices()[b][0] - 1.0).abs() > 1e-12));
    }

    #[test]
    fn uncovered_edge_is_reported() {
        let mesh = generate_crossed(1, 1, Rect::UNIT).unwrap();
        let err = mesh
            .tag_boundary(&[
                TagRule::new("left", |p| p[0] < 1e-12),
                TagRule::new("bottom", |p| p[1] < 1e-12),
                TagRule::new("right", |p| p[0] > 1.0 - 1e-12),
            ])
            .unwrap_err();
        // top edge joins vertices 2 and 3
        assert!(matches!(err, Error::UncoveredBoundaryEdge(2, 3)), "{err}");
    }

    #[test]
    fn invalid_cells_rejected() {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        assert!(Mesh2D::new(v.clone(), vec![[0, 2, 1]], None).is_err());
        assert!(Mesh2D::new(v.clone(), vec![[0, 1, 9]], None).is_err());
        let dup = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 0.0]];
        assert!(Mesh2D::new(dup, vec![[0, 1, 2]], None).is_err());
    }

    #[test]
    fn submesh_tags_cut_edges() {
        let mesh = generate_crossed(4, 2, Rect::new(0.0, 2.0, 0.0, 1.0))
            .unwrap()
            .with_regions(|c| Some(if c[0] < 1.0 { "fluid" } else { "porous" }.to_string()));
        let (fluid, parent) = mesh.submesh("fluid", "interface").unwrap();
        assert_eq!(fluid.num_cells(), 16);
        assert!((fluid.total_area() - 1.0).abs() < 1e-14);
        assert_eq!(fluid.tagged_edges("interface").count(), 2);
        for (local, &p) in parent.iter().enumerate() {
            assert_eq!(fluid.vertices()[local], mesh.vertices()[p]);
        }
    }
}
