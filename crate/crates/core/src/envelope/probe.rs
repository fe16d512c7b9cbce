//! The `h^(−1/2)` probe: for a P1 function with unit gradient on the cell
//! strip along `Γ = {x = 0}`, `‖∂ₙ,ε u_h‖_{L²(Γ)} / ‖u_h‖_{H¹}` blows up
//! like `h^(−1/2)` once `ε ≪ h`.

use std::sync::Arc;

use super::{CurveSegment, EnvelopeDecomposition, PiecewiseCurve};
use crate::error::{Error, Result};
use crate::experiment::{family_mesh, MeshFamily};
use crate::fem::{assemble_mass, assemble_stiffness, gauss_legendre, CellWeight, Family, FunctionSpace, TriangleGeometry};
use crate::mesh::{CellLocator, Point};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ProbeField {
    /// Interpolant of `(h − x)₊`: unit gradient on the first cell strip.
    BoundaryStrip,
    /// Interpolant of `x`.
    Linear,
    Zero,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeReport {
    /// `(level, h, ratio)` per level.
    pub rows: Vec<(u32, f64, f64)>,
    /// Least-squares slope of `log ratio` against `log h`.
    pub slope: f64,
}

/// `ε / h` used by the probe.
const EPS_FRACTION: f64 = 1e-3;
const QUAD_N: usize = 4;

pub fn fe_scaling_probe(family: &MeshFamily, levels: &[u32], field: ProbeField) -> Result<ProbeReport> {
    if levels.len() < 2 {
        return Err(Error::InvalidArgument("the scaling probe needs at least two levels".into()));
    }
    let mut rows = Vec::with_capacity(levels.len());
    for &level in levels {
        let mesh = Arc::new(family_mesh(family, level)?);
        let h = match family {
            MeshFamily::Structured => 0.5f64.powi(level as i32),
            MeshFamily::File(_) => mesh.max_edge_length(),
        };
        let space = FunctionSpace::new(mesh.clone(), Family::P1);
        let u = space.interpolate(|p| match field {
            ProbeField::BoundaryStrip => (h - p[0]).max(0.0),
            ProbeField::Linear => p[0],
            ProbeField::Zero => 0.0,
        });
        let k = assemble_stiffness(&space, 1.0)?.add_scaled(&assemble_mass(&space, CellWeight::None), 1.0)?;
        let h1 = k.bilinear(&u, &u).sqrt();
        if !(h1 > 0.0) {
            return Err(Error::InvalidArgument(format!("level {level}: u_h vanishes, ratio undefined")));
        }

        // Γ = {x = 0}, traversed downward so that the envelope lies in x > 0.
        let (y0, y1) = mesh
            .vertices()
            .iter()
            .filter(|p| p[0].abs() < 1e-12)
            .fold((f64::MAX, f64::MIN), |(a, b), p| (a.min(p[1]), b.max(p[1])));
        if !(y1 > y0) {
            return Err(Error::InvalidMesh("mesh has no edge on x = 0".into()));
        }
        let curve = PiecewiseCurve::new(vec![CurveSegment::line([0.0, y1], [0.0, y0])], false)?;
        let env = EnvelopeDecomposition::new(curve, EPS_FRACTION * h)?;
        let locator = CellLocator::new(&mesh);
        let grad = |p: Point| -> Point {
            let Some((cell, _)) = locator.locate(p) else { return [0.0, 0.0] };
            let geo = TriangleGeometry::new(mesh.cell_points(cell));
            let mut local = [0usize; 3];
            space.cell_scalar_dofs(cell, &mut local);
            let mut g = [0.0, 0.0];
            for (k, &d) in local.iter().enumerate() {
                g[0] += u[d] * geo.grad_bary[k][0];
                g[1] += u[d] * geo.grad_bary[k][1];
            }
            g
        };

        // Panels between consecutive boundary vertices keep ∇u_h smooth per panel.
        let mut breaks: Vec<f64> = mesh
            .vertices()
            .iter()
            .filter(|p| p[0].abs() < 1e-12)
            .map(|p| y1 - p[1])
            .collect();
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        let rule = gauss_legendre(QUAD_N);
        let mut norm2 = 0.0;
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            for &(x, wt) in &rule {
                let g = env.normal_average(&grad, 0, a + (b - a) * x, QUAD_N)?;
                norm2 += wt * (b - a) * g * g;
            }
        }
        rows.push((level, h, norm2.sqrt() / h1));
    }
    let slope = fit_slope(rows.iter().map(|&(_, h, r)| (h, r)));
    Ok(ProbeReport { rows, slope })
}

/// Least-squares slope in log-log coordinates.
pub fn fit_slope(points: impl Iterator<Item = (f64, f64)>) -> f64 {
    let pts: Vec<(f64, f64)> = points.map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x / n, b + y / n));
    let (sxy, sxx) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), &(x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    sxy / sxx
}
