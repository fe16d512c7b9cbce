use std::collections::HashMap;

use super::{distance, Mesh2D, Point};
use crate::error::{Error, Result};

/// How the interface edges are picked out of a 2D mesh.
pub enum InterfaceSelector<'a> {
    /// Boundary edges carrying this tag; normals are outward to the mesh.
    Tag(&'a str),
    /// Any edge whose both endpoints satisfy the predicate; normals are the
    /// chain tangent rotated clockwise.
    Line(Box<dyn Fn(Point) -> bool + 'a>),
}

impl<'a> InterfaceSelector<'a> {
    pub fn line(predicate: impl Fn(Point) -> bool + 'a) -> Self {
        InterfaceSelector::Line(Box::new(predicate))
    }
}

/// Ordered chain of segments. Segment `j` joins chain points `j` and `j + 1`
/// (modulo the point count for closed chains).
#[derive(Clone, Debug)]
pub struct InterfaceMesh1D {
    points: Vec<Point>,
    parent_vertices: Option<Vec<usize>>,
    lengths: Vec<f64>,
    normals: Vec<Point>,
    parent_facets: Option<Vec<usize>>,
    endpoint_flags: [bool; 2],
    closed: bool,
}

impl InterfaceMesh1D {
    /// Standalone chain through `points`; normals are tangents rotated clockwise.
    pub fn from_points(points: Vec<Point>, closed: bool) -> Result<Self> {
        let nseg = if closed { points.len() } else { points.len().saturating_sub(1) };
        if nseg == 0 || (closed && points.len() < 3) {
            return Err(Error::Interface("a chain needs at least one segment".into()));
        }
        let mut chain = InterfaceMesh1D {
            points,
            parent_vertices: None,
            lengths: Vec::new(),
            normals: Vec::new(),
            parent_facets: None,
            endpoint_flags: [false; 2],
            closed,
        };
        chain.compute_geometry()?;
        Ok(chain)
    }

    fn compute_geometry(&mut self) -> Result<()> {
        let n = self.num_segments();
        self.lengths = Vec::with_capacity(n);
        self.normals = Vec::with_capacity(n);
        for j in 0..n {
            let [p, q] = self.segment_points(j);
            let len = distance(p, q);
            if !(len > 0.0) {
                return Err(Error::Interface(format!("segment {j} has zero length")));
            }
            self.lengths.push(len);
            self.normals.push([(q[1] - p[1]) / len, -(q[0] - p[0]) / len]);
        }
        Ok(())
    }

    pub fn num_segments(&self) -> usize {
        if self.closed {
            self.points.len()
        } else {
            self.points.len() - 1
        }
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Chain point indices of segment `j`.
    pub fn segment(&self, j: usize) -> [usize; 2] {
        [j, (j + 1) % self.points.len()]
    }

    pub fn segment_points(&self, j: usize) -> [Point; 2] {
        let [a, b] = self.segment(j);
        [self.points[a], self.points[b]]
    }

    /// Parent-mesh vertex pair of segment `j`, when extracted from a mesh.
    pub fn segment_vertices(&self, j: usize) -> Option<[usize; 2]> {
        let pv = self.parent_vertices.as_ref()?;
        let [a, b] = self.segment(j);
        Some([pv[a], pv[b]])
    }

    pub fn parent_vertices(&self) -> Option<&[usize]> {
        self.parent_vertices.as_deref()
    }

    pub fn parent_facets(&self) -> Option<&[usize]> {
        self.parent_facets.as_deref()
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn normals(&self) -> &[Point] {
        &self.normals
    }

    pub fn normal(&self, j: usize) -> Point {
        self.normals[j]
    }

    pub fn total_length(&self) -> f64 {
        self.lengths.iter().sum()
    }

    /// Whether the first / last chain point touches a Dirichlet-tagged edge.
    pub fn endpoint_flags(&self) -> [bool; 2] {
        self.endpoint_flags
    }

    /// The same chain with every normal reversed.
    pub fn flipped(&self) -> Self {
        let mut out = self.clone();
        for n in &mut out.normals {
            *n = [-n[0], -n[1]];
        }
        out
    }

    /// Point at local coordinate `t ∈ [0, 1]` on segment `j`.
    pub fn point_on(&self, j: usize, t: f64) -> Point {
        let [p, q] = self.segment_points(j);
        [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]
    }
}

/// Collects the selected edges of `mesh` into an ordered chain. Open chains
/// start at the end point with the smallest `(y, x)`. `dirichlet_tags`
/// determines the endpoint flags.
pub fn extract_interface(
    mesh: &Mesh2D,
    selector: &InterfaceSelector<'_>,
    dirichlet_tags: &[&str],
) -> Result<InterfaceMesh1D> {
    let selected: Vec<usize> = match selector {
        InterfaceSelector::Tag(tag) => {
            if !mesh.has_tag(tag) {
                return Err(Error::UnknownTag(tag.to_string()));
            }
            mesh.tagged_edges(tag).collect()
        }
        InterfaceSelector::Line(pred) => (0..mesh.num_edges())
            .filter(|&e| {
                let [a, b] = mesh.edges()[e];
                pred(mesh.vertices()[a]) && pred(mesh.vertices()[b])
            })
            .collect(),
    };
    if selected.is_empty() {
        return Err(Error::Interface("no edges selected".into()));
    }

    let mut adjacency: HashMap<usize, Vec<usize>> = HashMap::new();
    for &e in &selected {
        let [a, b] = mesh.edges()[e];
        adjacency.entry(a).or_default().push(e);
        adjacency.entry(b).or_default().push(e);
    }
    if let Some((v, _)) = adjacency.iter().find(|(_, es)| es.len() > 2) {
        return Err(Error::Interface(format!("edge set branches at vertex {v}")));
    }
    let ends: Vec<usize> = adjacency
        .iter()
        .filter(|(_, es)| es.len() == 1)
        .map(|(&v, _)| v)
        .collect();
    let closed = match ends.len() {
        0 => true,
        2 => false,
        _ => return Err(Error::Interface("edge set is not a single chain".into())),
    };
    let key = |v: usize| {
        let p = mesh.vertices()[v];
        (p[1], p[0])
    };
    let lowest = |vs: &mut dyn Iterator<Item = usize>| {
        vs.min_by(|&a, &b| key(a).partial_cmp(&key(b)).unwrap()).unwrap()
    };
    let start = if closed {
        lowest(&mut adjacency.keys().copied())
    } else {
        lowest(&mut ends.iter().copied())
    };

    let mut vertices = vec![start];
    let mut facets = Vec::with_capacity(selected.len());
    let mut current = start;
    let mut previous_edge = usize::MAX;
    loop {
        let next_edge = adjacency[&current]
            .iter()
            .copied()
            .filter(|&e| e != previous_edge)
            .min_by(|&a, &b| {
                let other = |e: usize| {
                    let [x, y] = mesh.edges()[e];
                    if x == current {
                        y
                    } else {
                        x
                    }
                };
                key(other(a)).partial_cmp(&key(other(b))).unwrap()
            });
        let Some(e) = next_edge else { break };
        if facets.len() == selected.len() {
            break;
        }
        let [x, y] = mesh.edges()[e];
        let next = if x == current { y } else { x };
        facets.push(e);
        if next == start {
            break;
        }
        vertices.push(next);
        previous_edge = e;
        current = next;
    }
    if facets.len() != selected.len() {
        return Err(Error::Interface(format!(
            "edge set is disconnected ({} of {} edges reachable)",
            facets.len(),
            selected.len()
        )));
    }

    let mut chain = InterfaceMesh1D {
        points: vertices.iter().map(|&v| mesh.vertices()[v]).collect(),
        parent_vertices: Some(vertices.clone()),
        lengths: Vec::new(),
        normals: Vec::new(),
        parent_facets: Some(facets.clone()),
        endpoint_flags: [false; 2],
        closed,
    };
    chain.compute_geometry()?;
    if let InterfaceSelector::Tag(_) = selector {
        for (j, &e) in facets.iter().enumerate() {
            chain.normals[j] = mesh.boundary_normal(e);
        }
    }
    if !closed {
        let touches = |v: usize| {
            mesh.boundary_edges().any(|e| {
                let [a, b] = mesh.edges()[e];
                (a == v || b == v)
                    && !facets.contains(&e)
                    && mesh.edge_tag(e).is_some_and(|t| dirichlet_tags.contains(&t))
            })
        };
        chain.endpoint_flags = [touches(vertices[0]), touches(*vertices.last().unwrap())];
    }
    Ok(chain)
}
