use super::element::{
    basis_gradients, basis_values, Family, TriangleGeometry, SEGMENT_RULE, TRIANGLE_RULE,
};
use super::space::{FunctionSpace, MeshRef};
use crate::error::{Error, Result};
use crate::linalg::{SparseMatrix, TripletBuilder};
use crate::mesh::{barycentric, distance, InterfaceMesh1D, Mesh2D, Point};

/// Per-cell factor in mass-type forms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CellWeight {
    None,
    Constant(f64),
    /// `1 / |cell|` (area in 2D, length on interfaces).
    InverseCellVolume,
}

impl CellWeight {
    fn value(self, volume: f64) -> f64 {
        match self {
            CellWeight::None => 1.0,
            CellWeight::Constant(c) => c,
            CellWeight::InverseCellVolume => 1.0 / volume,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceMode {
    Scalar,
    /// `u ↦ u · n` with the interface normal.
    NormalComponent,
}

const MAX_LOCAL: usize = 6;

/// Symmetric local-to-global scatter for a square form on one space.
struct Scatter<'a> {
    rows: &'a FunctionSpace,
    cols: &'a FunctionSpace,
    t: TripletBuilder,
}

impl<'a> Scatter<'a> {
    fn new(rows: &'a FunctionSpace, cols: &'a FunctionSpace) -> Self {
        Scatter {
            rows,
            cols,
            t: TripletBuilder::new(rows.dim(), cols.dim()),
        }
    }

    #[inline]
    fn add(&mut self, i: usize, j: usize, v: f64) {
        if let (Some(r), Some(c)) = (self.rows.index(i), self.cols.index(j)) {
            self.t.push(r, c, v);
        }
    }

    fn finish(self) -> SparseMatrix {
        self.t.build()
    }
}

fn require_plane<'a>(space: &'a FunctionSpace, what: &str) -> Result<&'a Mesh2D> {
    space
        .plane_mesh()
        .map(|m| m.as_ref())
        .ok_or_else(|| Error::InvalidArgument(format!("{what} needs a space on a 2D mesh")))
}

fn require_interface<'a>(space: &'a FunctionSpace, what: &str) -> Result<&'a InterfaceMesh1D> {
    space
        .interface_mesh()
        .map(|m| m.as_ref())
        .ok_or_else(|| Error::InvalidArgument(format!("{what} needs a space on an interface")))
}

/// `M_ij = Σ_cells w_c ∫ φ_j φ_i`.
pub fn assemble_mass(space: &FunctionSpace, weight: CellWeight) -> SparseMatrix {
    let mut s = Scatter::new(space, space);
    match space.mesh() {
        MeshRef::Plane(mesh) => {
            let family = space.family();
            let nloc = family.local_dim();
            let ns = space.scalar_dim();
            let mut dofs = [0usize; MAX_LOCAL];
            let mut phi = [0.0; MAX_LOCAL];
            for c in 0..mesh.num_cells() {
                space.cell_scalar_dofs(c, &mut dofs);
                let area = mesh.cell_area(c);
                let wc = weight.value(area);
                let mut local = [[0.0; MAX_LOCAL]; MAX_LOCAL];
                for (l, w) in TRIANGLE_RULE {
                    basis_values(family, l, &mut phi);
                    let f = w * area * wc;
                    for a in 0..nloc {
                        for b in a..nloc {
                            local[a][b] += f * phi[a] * phi[b];
                        }
                    }
                }
                for comp in 0..family.components() {
                    let off = comp * ns;
                    for a in 0..nloc {
                        for b in a..nloc {
                            s.add(off + dofs[a], off + dofs[b], local[a][b]);
                            if a != b {
                                s.add(off + dofs[b], off + dofs[a], local[a][b]);
                            }
                        }
                    }
                }
            }
        }
        MeshRef::Interface(chain) => {
            for j in 0..chain.num_segments() {
                let h = chain.lengths()[j];
                let wc = weight.value(h);
                match space.family() {
                    Family::P0 => s.add(j, j, wc * h),
                    _ => {
                        let [a, b] = chain.segment(j);
                        let (d, o) = (wc * h / 3.0, wc * h / 6.0);
                        s.add(a, a, d);
                        s.add(b, b, d);
                        s.add(a, b, o);
                        s.add(b, a, o);
                    }
                }
            }
        }
    }
    s.finish()
}

/// `A_ij = c ∫ ∇φ_j · ∇φ_i`, componentwise for vector spaces.
pub fn assemble_stiffness(space: &FunctionSpace, coefficient: f64) -> Result<SparseMatrix> {
    if space.family() == Family::P0 {
        return Err(Error::InvalidArgument(
            "stiffness is undefined for P0 (use the interface DG form)".into(),
        ));
    }
    let mut s = Scatter::new(space, space);
    match space.mesh() {
        MeshRef::Plane(mesh) => {
            let family = space.family();
            let nloc = family.local_dim();
            let ns = space.scalar_dim();
            let mut dofs = [0usize; MAX_LOCAL];
            let mut grad = [[0.0; 2]; MAX_LOCAL];
            for c in 0..mesh.num_cells() {
                space.cell_scalar_dofs(c, &mut dofs);
                let geo = TriangleGeometry::new(mesh.cell_points(c));
                let mut local = [[0.0; MAX_LOCAL]; MAX_LOCAL];
                for (l, w) in TRIANGLE_RULE {
                    basis_gradients(family, &geo, l, &mut grad);
                    let f = w * geo.area * coefficient;
                    for a in 0..nloc {
                        for b in a..nloc {
                            local[a][b] += f * (grad[a][0] * grad[b][0] + grad[a][1] * grad[b][1]);
                        }
                    }
                }
                for comp in 0..family.components() {
                    let off = comp * ns;
                    for a in 0..nloc {
                        for b in a..nloc {
                            s.add(off + dofs[a], off + dofs[b], local[a][b]);
                            if a != b {
                                s.add(off + dofs[b], off + dofs[a], local[a][b]);
                            }
                        }
                    }
                }
            }
        }
        MeshRef::Interface(chain) => {
            for j in 0..chain.num_segments() {
                let [a, b] = chain.segment(j);
                let v = coefficient / chain.lengths()[j];
                s.add(a, a, v);
                s.add(b, b, v);
                s.add(a, b, -v);
                s.add(b, a, -v);
            }
        }
    }
    Ok(s.finish())
}

/// `B_ij = ∫ (∇·φ_j) ψ_i`: rows are pressure dofs, columns velocity dofs.
pub fn assemble_divergence(velocity: &FunctionSpace, pressure: &FunctionSpace) -> Result<SparseMatrix> {
    let vmesh = require_plane(velocity, "divergence")?;
    let pmesh = require_plane(pressure, "divergence")?;
    if velocity.family() != Family::VectorP2 {
        return Err(Error::InvalidArgument("divergence needs a vector P2 velocity space".into()));
    }
    if !std::ptr::eq(vmesh, pmesh) {
        return Err(Error::InvalidArgument("velocity and pressure live on different meshes".into()));
    }
    let pf = pressure.family();
    let (nv, np) = (6, pf.local_dim());
    let ns = velocity.scalar_dim();
    let mut s = Scatter::new(pressure, velocity);
    let (mut vd, mut pd) = ([0usize; MAX_LOCAL], [0usize; MAX_LOCAL]);
    let mut grad = [[0.0; 2]; MAX_LOCAL];
    let mut psi = [0.0; MAX_LOCAL];
    for c in 0..vmesh.num_cells() {
        velocity.cell_scalar_dofs(c, &mut vd);
        pressure.cell_scalar_dofs(c, &mut pd);
        let geo = TriangleGeometry::new(vmesh.cell_points(c));
        let mut local = [[[0.0; 2]; MAX_LOCAL]; MAX_LOCAL];
        for (l, w) in TRIANGLE_RULE {
            basis_gradients(Family::P2, &geo, l, &mut grad);
            basis_values(pf, l, &mut psi);
            for b in 0..np {
                for a in 0..nv {
                    for comp in 0..2 {
                        local[b][a][comp] += w * geo.area * psi[b] * grad[a][comp];
                    }
                }
            }
        }
        for b in 0..np {
            for a in 0..nv {
                for comp in 0..2 {
                    s.add(pd[b], comp * ns + vd[a], local[b][a][comp]);
                }
            }
        }
    }
    Ok(s.finish())
}

/// Owning domain cell of each interface segment, matched by coordinates
/// against the domain's boundary edges.
pub fn facet_cells(domain: &Mesh2D, chain: &InterfaceMesh1D) -> Result<Vec<usize>> {
    const TOL: f64 = 1e-10;
    let boundary: Vec<usize> = {
        let mut v: Vec<usize> = domain.boundary_edges().flat_map(|e| domain.edges()[e]).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let find = |p: Point| boundary.iter().copied().find(|&v| distance(domain.vertices()[v], p) <= TOL);
    let points: Vec<Option<usize>> = chain.points().iter().map(|&p| find(p)).collect();
    (0..chain.num_segments())
        .map(|j| {
            let [a, b] = chain.segment(j);
            let edge = match (points[a], points[b]) {
                (Some(va), Some(vb)) => domain.edge_id(va, vb),
                _ => None,
            };
            match edge {
                Some(e) if domain.edge_cells(e).1.is_none() => Ok(domain.edge_cells(e).0),
                _ => Err(Error::Interface(format!(
                    "interface segment {j} is not a boundary facet of the domain"
                ))),
            }
        })
        .collect()
}

/// Interface basis values at local coordinate `t` of segment `j`:
/// `(dof, value)` pairs.
fn interface_basis(space: &FunctionSpace, chain: &InterfaceMesh1D, j: usize, t: f64) -> [(usize, f64); 2] {
    match space.family() {
        Family::P0 => [(j, 1.0), (j, 0.0)],
        _ => {
            let [a, b] = chain.segment(j);
            [(a, 1.0 - t), (b, t)]
        }
    }
}

/// Calls `f(j, t_weight, bary, cell)` at each facet quadrature point; the
/// weight already includes the segment length.
fn for_each_facet_point(
    domain: &Mesh2D,
    chain: &InterfaceMesh1D,
    mut f: impl FnMut(usize, f64, f64, [f64; 3], usize),
) -> Result<()> {
    let cells = facet_cells(domain, chain)?;
    for (j, &cell) in cells.iter().enumerate() {
        let tri = domain.cell_points(cell);
        let h = chain.lengths()[j];
        for (t, w) in SEGMENT_RULE {
            let l = barycentric(tri, chain.point_on(j, t));
            f(j, t, w * h, l, cell);
        }
    }
    Ok(())
}

/// `C_ij = ∫_Γ (T φ_j) ψ_i`, with `T φ = φ · n` in normal-component mode.
pub fn assemble_trace_coupling(
    domain: &FunctionSpace,
    interface: &FunctionSpace,
    mode: TraceMode,
) -> Result<SparseMatrix> {
    let mesh = require_plane(domain, "trace coupling")?;
    let chain = require_interface(interface, "trace coupling")?;
    let family = domain.family();
    match (mode, family) {
        (TraceMode::NormalComponent, Family::VectorP2) => {}
        (TraceMode::Scalar, Family::P1 | Family::P2) => {}
        _ => {
            return Err(Error::InvalidArgument(format!(
                "{mode:?} trace of a {} space",
                family.name()
            )))
        }
    }
    let nloc = family.local_dim();
    let ns = domain.scalar_dim();
    let mut s = Scatter::new(interface, domain);
    let mut dofs = [0usize; MAX_LOCAL];
    let mut phi = [0.0; MAX_LOCAL];
    for_each_facet_point(mesh, chain, |j, t, w, l, cell| {
        domain.cell_scalar_dofs(cell, &mut dofs);
        basis_values(family, l, &mut phi);
        let n = chain.normal(j);
        for (i, psi) in interface_basis(interface, chain, j, t) {
            if psi == 0.0 {
                continue;
            }
            for a in 0..nloc {
                match mode {
                    TraceMode::Scalar => s.add(i, dofs[a], w * psi * phi[a]),
                    TraceMode::NormalComponent => {
                        for comp in 0..2 {
                            s.add(i, comp * ns + dofs[a], w * psi * phi[a] * n[comp]);
                        }
                    }
                }
            }
        }
    })?;
    Ok(s.finish())
}

/// `D ∫_Γ (u·τ)(v·τ)` on a vector P2 space, `τ` the interface tangent.
pub fn assemble_tangential_mass(
    velocity: &FunctionSpace,
    chain: &InterfaceMesh1D,
    weight: f64,
) -> Result<SparseMatrix> {
    let mesh = require_plane(velocity, "tangential mass")?;
    if velocity.family() != Family::VectorP2 {
        return Err(Error::InvalidArgument("tangential mass needs a vector P2 space".into()));
    }
    let ns = velocity.scalar_dim();
    let mut s = Scatter::new(velocity, velocity);
    let mut dofs = [0usize; MAX_LOCAL];
    let mut phi = [0.0; MAX_LOCAL];
    for_each_facet_point(mesh, chain, |j, _t, w, l, cell| {
        velocity.cell_scalar_dofs(cell, &mut dofs);
        basis_values(Family::P2, l, &mut phi);
        let n = chain.normal(j);
        let tau = [-n[1], n[0]];
        for a in 0..6 {
            for b in 0..6 {
                let v = weight * w * phi[a] * phi[b];
                for ca in 0..2 {
                    for cb in 0..2 {
                        s.add(ca * ns + dofs[a], cb * ns + dofs[b], v * tau[ca] * tau[cb]);
                    }
                }
            }
        }
    })?;
    Ok(s.finish())
}

/// `K ∫_Γ (∇φ_j · n) ψ_i` with the one-sided gradient of the owning cell and
/// the interface normal used as stored.
pub fn assemble_normal_derivative_coupling(
    pressure: &FunctionSpace,
    multiplier: &FunctionSpace,
    coefficient: f64,
) -> Result<SparseMatrix> {
    let mesh = require_plane(pressure, "normal derivative coupling")?;
    let chain = require_interface(multiplier, "normal derivative coupling")?;
    let family = pressure.family();
    if !matches!(family, Family::P1 | Family::P2) {
        return Err(Error::InvalidArgument(format!(
            "normal derivative of a {} space",
            family.name()
        )));
    }
    let nloc = family.local_dim();
    let mut s = Scatter::new(multiplier, pressure);
    let mut dofs = [0usize; MAX_LOCAL];
    let mut grad = [[0.0; 2]; MAX_LOCAL];
    for_each_facet_point(mesh, chain, |j, t, w, l, cell| {
        pressure.cell_scalar_dofs(cell, &mut dofs);
        let geo = TriangleGeometry::new(mesh.cell_points(cell));
        basis_gradients(family, &geo, l, &mut grad);
        let n = chain.normal(j);
        for (i, psi) in interface_basis(multiplier, chain, j, t) {
            if psi == 0.0 {
                continue;
            }
            for a in 0..nloc {
                let dn = grad[a][0] * n[0] + grad[a][1] * n[1];
                s.add(i, dofs[a], coefficient * w * psi * dn);
            }
        }
    })?;
    Ok(s.finish())
}

/// DG form `Σ_ν ⟨h⟩⁻¹ ⟦φ_j⟧⟦φ_i⟧` over the chain vertices. Interior vertices
/// use the mean of the adjacent lengths; the end points of an open chain
/// count as facets with jump = trace and `⟨h⟩ = h`.
pub fn assemble_p0_interface_stiffness(space: &FunctionSpace) -> Result<SparseMatrix> {
    let chain = require_interface(space, "P0 interface stiffness")?;
    if space.family() != Family::P0 {
        return Err(Error::InvalidArgument("interface stiffness needs a P0 space".into()));
    }
    let n = chain.num_segments();
    let h = chain.lengths();
    let mut s = Scatter::new(space, space);
    let interior = if chain.is_closed() { n } else { n - 1 };
    for k in 0..interior {
        let (a, b) = (k, (k + 1) % n);
        if a == b {
            continue;
        }
        let v = 2.0 / (h[a] + h[b]);
        s.add(a, a, v);
        s.add(b, b, v);
        s.add(a, b, -v);
        s.add(b, a, -v);
    }
    if !chain.is_closed() {
        s.add(0, 0, 1.0 / h[0]);
        s.add(n - 1, n - 1, 1.0 / h[n - 1]);
    }
    Ok(s.finish())
}

/// `∫ f φ_i` on a scalar 2D space.
pub fn assemble_load(space: &FunctionSpace, f: impl Fn(Point) -> f64) -> Result<Vec<f64>> {
    assemble_vector_load(space, |p| [f(p), 0.0])
}

/// `∫ f · φ_i`; scalar spaces use the first component of `f`.
pub fn assemble_vector_load(space: &FunctionSpace, f: impl Fn(Point) -> [f64; 2]) -> Result<Vec<f64>> {
    let mut out = vec![0.0; space.dim()];
    match space.mesh() {
        MeshRef::Plane(mesh) => {
            let family = space.family();
            let nloc = family.local_dim();
            let ns = space.scalar_dim();
            let mut dofs = [0usize; MAX_LOCAL];
            let mut phi = [0.0; MAX_LOCAL];
            for c in 0..mesh.num_cells() {
                space.cell_scalar_dofs(c, &mut dofs);
                let pts = mesh.cell_points(c);
                let area = mesh.cell_area(c);
                for (l, w) in TRIANGLE_RULE {
                    basis_values(family, l, &mut phi);
                    let x = [
                        l[0] * pts[0][0] + l[1] * pts[1][0] + l[2] * pts[2][0],
                        l[0] * pts[0][1] + l[1] * pts[1][1] + l[2] * pts[2][1],
                    ];
                    let fx = f(x);
                    for comp in 0..family.components() {
                        for a in 0..nloc {
                            if let Some(i) = space.index(comp * ns + dofs[a]) {
                                out[i] += w * area * fx[comp] * phi[a];
                            }
                        }
                    }
                }
            }
        }
        MeshRef::Interface(chain) => {
            for j in 0..chain.num_segments() {
                let h = chain.lengths()[j];
                for (t, w) in SEGMENT_RULE {
                    let g = f(chain.point_on(j, t))[0];
                    for (d, psi) in interface_basis(space, chain, j, t) {
                        if let Some(i) = space.index(d) {
                            out[i] += w * h * g * psi;
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}
