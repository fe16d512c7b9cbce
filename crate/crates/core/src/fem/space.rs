use std::sync::Arc;

use super::element::Family;
use crate::error::{Error, Result};
use crate::mesh::{InterfaceMesh1D, Mesh2D};

/// The mesh a space lives on.
#[derive(Clone, Debug)]
pub enum MeshRef {
    Plane(Arc<Mesh2D>),
    Interface(Arc<InterfaceMesh1D>),
}

/// A finite element space with an optional reduced numbering that drops
/// Dirichlet dofs. Unreduced ("full") dof numbering:
///
/// * P0: cell index; P1: vertex (or chain point) index;
/// * P2: vertex `v` → `v`, edge `e` → `num_vertices + e`;
/// * vector P2: component `c` of scalar dof `i` → `c * n_scalar + i`.
#[derive(Clone, Debug)]
pub struct FunctionSpace {
    mesh: MeshRef,
    family: Family,
    full_dim: usize,
    dirichlet: Vec<usize>,
    numbering: Option<Vec<Option<usize>>>,
    dim: usize,
}

impl FunctionSpace {
    pub fn new(mesh: Arc<Mesh2D>, family: Family) -> Self {
        let scalar = match family {
            Family::P0 => mesh.num_cells(),
            Family::P1 => mesh.num_vertices(),
            Family::P2 | Family::VectorP2 => mesh.num_vertices() + mesh.num_edges(),
        };
        let full_dim = scalar * family.components();
        FunctionSpace {
            mesh: MeshRef::Plane(mesh),
            family,
            full_dim,
            dirichlet: Vec::new(),
            numbering: None,
            dim: full_dim,
        }
    }

    /// P0 or P1 space on an interface chain.
    pub fn on_interface(mesh: Arc<InterfaceMesh1D>, family: Family) -> Result<Self> {
        let full_dim = match family {
            Family::P0 => mesh.num_segments(),
            Family::P1 => mesh.num_points(),
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "{} is not available on interface meshes",
                    family.name()
                )))
            }
        };
        Ok(FunctionSpace {
            mesh: MeshRef::Interface(mesh),
            family,
            full_dim,
            dirichlet: Vec::new(),
            numbering: None,
            dim: full_dim,
        })
    }

    /// Copy of this space without the dofs on edges carrying any of `tags`.
    pub fn with_dirichlet(&self, tags: &[&str]) -> Result<Self> {
        let mesh = self.plane_mesh().ok_or_else(|| {
            Error::InvalidArgument("Dirichlet tags need a space on a 2D mesh".into())
        })?;
        let mut flagged = vec![false; self.full_dim];
        for tag in tags {
            if !mesh.has_tag(tag) {
                return Err(Error::UnknownTag(tag.to_string()));
            }
            for e in mesh.tagged_edges(tag) {
                for d in self.edge_dofs(e) {
                    flagged[d] = true;
                }
            }
        }
        let mut numbering = vec![None; self.full_dim];
        let mut next = 0;
        let mut dirichlet = Vec::new();
        for (d, &f) in flagged.iter().enumerate() {
            if f {
                dirichlet.push(d);
            } else {
                numbering[d] = Some(next);
                next += 1;
            }
        }
        Ok(FunctionSpace {
            mesh: self.mesh.clone(),
            family: self.family,
            full_dim: self.full_dim,
            dirichlet,
            numbering: Some(numbering),
            dim: next,
        })
    }

    /// The same space without any reduction.
    pub fn unreduced(&self) -> Self {
        FunctionSpace {
            dirichlet: Vec::new(),
            numbering: None,
            dim: self.full_dim,
            ..self.clone()
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn mesh(&self) -> &MeshRef {
        &self.mesh
    }

    pub fn plane_mesh(&self) -> Option<&Arc<Mesh2D>> {
        match &self.mesh {
            MeshRef::Plane(m) => Some(m),
            MeshRef::Interface(_) => None,
        }
    }

    pub fn interface_mesh(&self) -> Option<&Arc<InterfaceMesh1D>> {
        match &self.mesh {
            MeshRef::Interface(m) => Some(m),
            MeshRef::Plane(_) => None,
        }
    }

    /// Number of (reduced) dofs.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn full_dim(&self) -> usize {
        self.full_dim
    }

    pub fn scalar_dim(&self) -> usize {
        self.full_dim / self.family.components()
    }

    /// Eliminated dofs in full numbering, ascending.
    pub fn dirichlet_dofs(&self) -> &[usize] {
        &self.dirichlet
    }

    /// Kept dofs in full numbering, ascending.
    pub fn free_dofs(&self) -> Vec<usize> {
        (0..self.full_dim).filter(|&d| self.index(d).is_some()).collect()
    }

    /// Reduced index of full dof `d`, `None` if eliminated.
    #[inline]
    pub fn index(&self, d: usize) -> Option<usize> {
        match &self.numbering {
            Some(map) => map[d],
            None => Some(d),
        }
    }

    /// Full scalar dofs of a 2D cell in local basis order.
    pub fn cell_scalar_dofs(&self, cell: usize, out: &mut [usize]) {
        let mesh = self.plane_mesh().expect("2D space");
        match self.family {
            Family::P0 => out[0] = cell,
            Family::P1 => out[..3].copy_from_slice(&mesh.cells()[cell]),
            Family::P2 | Family::VectorP2 => {
                let nv = mesh.num_vertices();
                out[..3].copy_from_slice(&mesh.cells()[cell]);
                for (k, e) in mesh.cell_edges(cell).iter().enumerate() {
                    out[3 + k] = nv + e;
                }
            }
        }
    }

    /// Full dofs (all components) located on the closed edge `e`.
    pub fn edge_dofs(&self, e: usize) -> Vec<usize> {
        let mesh = self.plane_mesh().expect("2D space");
        let [a, b] = mesh.edges()[e];
        let scalar: Vec<usize> = match self.family {
            Family::P0 => Vec::new(),
            Family::P1 => vec![a, b],
            Family::P2 | Family::VectorP2 => vec![a, b, mesh.num_vertices() + e],
        };
        let ns = self.scalar_dim();
        (0..self.family.components())
            .flat_map(|c| scalar.iter().map(move |&d| c * ns + d))
            .collect()
    }

    /// Restricts a full-length coefficient vector to the reduced numbering.
    pub fn restrict(&self, full: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (d, &v) in full.iter().enumerate() {
            if let Some(i) = self.index(d) {
                out[i] = v;
            }
        }
        out
    }

    /// Extends a reduced vector by zeros on eliminated dofs.
    pub fn extend(&self, reduced: &[f64]) -> Vec<f64> {
        (0..self.full_dim)
            .map(|d| self.index(d).map_or(0.0, |i| reduced[i]))
            .collect()
    }

    /// Coordinates of each full scalar dof (nodal points of the element).
    pub fn scalar_dof_points(&self) -> Vec<[f64; 2]> {
        match &self.mesh {
            MeshRef::Plane(mesh) => match self.family {
                Family::P0 => (0..mesh.num_cells())
                    .map(|c| {
                        let [a, b, d] = mesh.cell_points(c);
                        [(a[0] + b[0] + d[0]) / 3.0, (a[1] + b[1] + d[1]) / 3.0]
                    })
                    .collect(),
                Family::P1 => mesh.vertices().to_vec(),
                Family::P2 | Family::VectorP2 => {
                    let mut pts = mesh.vertices().to_vec();
                    pts.extend((0..mesh.num_edges()).map(|e| mesh.edge_midpoint(e)));
                    pts
                }
            },
            MeshRef::Interface(chain) => match self.family {
                Family::P0 => (0..chain.num_segments()).map(|j| chain.point_on(j, 0.5)).collect(),
                _ => chain.points().to_vec(),
            },
        }
    }

    /// Nodal interpolant (full numbering) of a scalar function.
    pub fn interpolate(&self, f: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
        self.scalar_dof_points().into_iter().map(f).collect()
    }

    /// Nodal interpolant (full numbering) of a vector function.
    pub fn interpolate_vector(&self, f: impl Fn([f64; 2]) -> [f64; 2]) -> Vec<f64> {
        let pts = self.scalar_dof_points();
        let mut out = vec![0.0; self.full_dim];
        let ns = pts.len();
        for (i, p) in pts.into_iter().enumerate() {
            let v = f(p);
            out[i] = v[0];
            out[ns + i] = v[1];
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_crossed, Rect, TagRule};

    #[test]
    fn dimensions_follow_mesh_counts() {
        let mesh = Arc::new(generate_crossed(2, 2, Rect::UNIT).unwrap());
        let (nv, nc, ne) = (mesh.num_vertices(), mesh.num_cells(), mesh.num_edges());
        assert_eq!(FunctionSpace::new(mesh.clone(), Family::P0).dim(), nc);
        assert_eq!(FunctionSpace::new(mesh.clone(), Family::P1).dim(), nv);
        assert_eq!(FunctionSpace::new(mesh.clone(), Family::P2).dim(), nv + ne);
        assert_eq!(FunctionSpace::new(mesh, Family::VectorP2).dim(), 2 * (nv + ne));
    }

    #[test]
    fn all_boundary_dirichlet_keeps_interior_vertices() {
        let mesh = Arc::new(generate_crossed(4, 4, Rect::UNIT).unwrap());
        let v = FunctionSpace::new(mesh, Family::P1).with_dirichlet(&["boundary"]).unwrap();
        // 3×3 interior grid vertices plus 16 centers
        assert_eq!(v.dim(), 9 + 16);
        assert!(v.dirichlet_dofs().len() + v.dim() == v.full_dim());
    }

    #[test]
    fn unknown_tag_rejected() {
        let mesh = Arc::new(generate_crossed(1, 1, Rect::UNIT).unwrap());
        let v = FunctionSpace::new(mesh, Family::P1);
        assert!(matches!(v.with_dirichlet(&["nope"]), Err(Error::UnknownTag(_))));
    }

    #[test]
    fn vector_dirichlet_covers_both_components() {
        let mesh = Arc::new(
            generate_crossed(2, 2, Rect::UNIT)
                .unwrap()
                .tag_boundary(&[TagRule::new("left", |p| p[0] < 1e-12), TagRule::otherwise("rest")])
                .unwrap(),
        );
        let v = FunctionSpace::new(mesh, Family::VectorP2).with_dirichlet(&["left"]).unwrap();
        // 3 vertices + 2 edges on x = 0, two components each
        assert_eq!(v.dirichlet_dofs().len(), 10);
    }
}
