//! Quadrature over `Γ_ε`: tensor Gauss rules in `(t, s)` on each normal
//! envelope (trimmed by the bisector near overlap corners) and in polar
//! coordinates on corner sectors.

use super::{EnvelopeDecomposition, Region};
use crate::error::{Error, Result};
use crate::fem::gauss_legendre;
use crate::mesh::Point;

/// Longest `t`-panel of the composite rule along a segment.
const PANEL: f64 = 0.25;
const BISECTIONS: usize = 60;

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

impl EnvelopeDecomposition {
    fn assigned_to(&self, segment: usize, y: Point) -> bool {
        match self.classify(y) {
            Ok(Region::NormalEnvelope { segment: s, .. } | Region::OverlapWedge { segment: s, .. }) => s == segment,
            _ => false,
        }
    }

    /// Largest `s ≤ ε` such that the normal ray at `t` still belongs to `segment`.
    fn trim(&self, segment: usize, t: f64) -> f64 {
        let seg = &self.curve.segments[segment];
        if self.assigned_to(segment, seg.at(t, self.eps)) {
            return self.eps;
        }
        let (mut lo, mut hi) = (0.0, self.eps);
        for _ in 0..BISECTIONS {
            let mid = 0.5 * (lo + hi);
            if self.assigned_to(segment, seg.at(t, mid)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Where the full-height part of the envelope of `segment` starts
    /// (`from_end = false`) or stops.
    fn untrimmed_limit(&self, segment: usize, from_end: bool) -> f64 {
        let seg = &self.curve.segments[segment];
        let l = seg.length();
        let full = |t: f64| self.assigned_to(segment, seg.at(t, self.eps));
        let (mut inside, mut outside) = if from_end { (0.5 * l, l) } else { (0.5 * l, 0.0) };
        if full(outside) {
            return outside;
        }
        for _ in 0..BISECTIONS {
            let mid = 0.5 * (inside + outside);
            if full(mid) {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        inside
    }

    /// `∫_{Γ_ε} f(y, region) dy` with `quad_n` Gauss points per direction
    /// and panel.
    pub fn integrate(&self, f: impl Fn(Point, &Region) -> f64, quad_n: usize) -> Result<f64> {
        if quad_n < 1 {
            return Err(Error::InvalidArgument("quadrature resolution must be at least 1".into()));
        }
        let rule = gauss_legendre(quad_n);
        let mut total = 0.0;
        for (i, seg) in self.curve.segments.iter().enumerate() {
            let l = seg.length();
            let start_corner = self.curve.corner_at_start(i).filter(|c| !c.has_sector());
            let end_corner = self.curve.corner_at_end(i).filter(|c| !c.has_sector());
            let ta = if start_corner.is_some() { self.untrimmed_limit(i, false) } else { 0.0 };
            let tb = if end_corner.is_some() { self.untrimmed_limit(i, true) } else { l };
            let corner_index = |c: Option<&super::Corner>| {
                c.and_then(|c| self.curve.corners.iter().position(|d| d == c))
            };
            let mut pieces = vec![(ta, tb, None)];
            if ta > 0.0 {
                pieces.push((0.0, ta, corner_index(start_corner)));
            }
            if tb < l {
                pieces.push((tb, l, corner_index(end_corner)));
            }
            for (a, b, wedge) in pieces {
                let panels = ((b - a) / PANEL).ceil().max(1.0) as usize;
                let dt = (b - a) / panels as f64;
                for p in 0..panels {
                    for &(xt, wt) in &rule {
                        let t = a + dt * (p as f64 + xt);
                        let top = if wedge.is_some() { self.trim(i, t) } else { self.eps };
                        for &(xs, ws) in &rule {
                            let s = top * xs;
                            let region = match wedge {
                                Some(corner) => Region::OverlapWedge { corner, segment: i, t, s },
                                None => Region::NormalEnvelope { segment: i, t, s },
                            };
                            total += wt * dt * ws * top * seg.jacobian(s) * f(seg.at(t, s), &region);
                        }
                    }
                }
            }
        }
        for (k, c) in self.curve.corners.iter().enumerate() {
            if !c.has_sector() {
                continue;
            }
            let psi = c.half_angle();
            for &(xa, wa) in &rule {
                let angle = psi * (2.0 * xa - 1.0);
                for &(xr, wr) in &rule {
                    let r = self.eps * xr;
                    let region = Region::CornerSector { corner: k, r, angle };
                    let y = self.region_point(&region);
                    total += wa * 2.0 * psi * wr * self.eps * r * f(y, &region);
                }
            }
        }
        Ok(total)
    }

    /// `|Γ_ε|`.
    pub fn area(&self, quad_n: usize) -> Result<f64> {
        self.integrate(|_, _| 1.0, quad_n)
    }

    /// `(1/ε) ∫_{Γ_ε} ∇u · n_{Γε} E_ε w dy`.
    pub fn dnn_eps(
        &self,
        grad_u: impl Fn(Point) -> Point,
        w: impl Fn(f64) -> f64,
        quad_n: usize,
    ) -> Result<f64> {
        let total = self.integrate(
            |y, region| dot(grad_u(y), self.region_normal(region)) * w(self.region_foot(region)),
            quad_n,
        )?;
        Ok(total / self.eps)
    }

    /// `(1/ε) ∫_{Γ_ε} v φ dy`.
    pub fn trace_pair_eps(
        &self,
        v: impl Fn(Point) -> f64,
        phi: impl Fn(Point) -> f64,
        quad_n: usize,
    ) -> Result<f64> {
        Ok(self.integrate(|y, _| v(y) * phi(y), quad_n)? / self.eps)
    }

    /// Normal-ray average `(1/ε) ∫_0^ε ∇u · n J ds` at `t` on a segment
    /// whose envelope is not trimmed there; the `L²(Γ)` density of `∂ₙ,ε u`.
    pub fn normal_average(
        &self,
        grad_u: impl Fn(Point) -> Point,
        segment: usize,
        t: f64,
        quad_n: usize,
    ) -> Result<f64> {
        let seg = self
            .curve
            .segments
            .get(segment)
            .ok_or_else(|| Error::InvalidArgument(format!("no segment {segment}")))?;
        if quad_n < 1 {
            return Err(Error::InvalidArgument("quadrature resolution must be at least 1".into()));
        }
        let nu = seg.inward(t);
        let n = [-nu[0], -nu[1]];
        let sum: f64 = gauss_legendre(quad_n)
            .iter()
            .map(|&(xs, ws)| {
                let s = self.eps * xs;
                ws * seg.jacobian(s) * dot(grad_u(seg.at(t, s)), n)
            })
            .sum();
        Ok(sum)
    }
}
