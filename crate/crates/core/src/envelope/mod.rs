//! ε-thick envelopes of piecewise-smooth interface curves, the extension
//! `E_ε`, the averaged normal derivative `∂ₙ,ε` and the FE scaling probe.
//!
//! Convention: `Ω_p` lies to the left of the direction of traversal, so the
//! envelope is swept along the left normal `ν` and the outward normal of
//! `Ω_p` is `n = −ν`. Corner angles `θ` are measured on the `n` side: a
//! right turn (`θ < π`) leaves a gap filled by a circle sector of angle
//! `π − θ`, a left turn (`θ > π`) makes the two normal envelopes overlap in
//! a wedge that is split between them.

mod probe;
mod quad;

pub use probe::{fe_scaling_probe, fit_slope, ProbeField, ProbeReport};

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::mesh::Point;

const JOIN_TOL: f64 = 1e-10;
/// Joints turning by less than this are smooth and carry no corner.
const SMOOTH_TURN: f64 = 1e-9;

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn left(t: Point) -> Point {
    [-t[1], t[0]]
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CurveSegment {
    Line { a: Point, b: Point },
    /// Angles in radians; `end < start` runs clockwise.
    Arc { center: Point, radius: f64, start: f64, end: f64 },
}

impl CurveSegment {
    pub fn line(a: Point, b: Point) -> Self {
        CurveSegment::Line { a, b }
    }

    pub fn arc(center: Point, radius: f64, start: f64, end: f64) -> Self {
        CurveSegment::Arc { center, radius, start, end }
    }

    pub fn length(&self) -> f64 {
        match *self {
            CurveSegment::Line { a, b } => norm(sub(b, a)),
            CurveSegment::Arc { radius, start, end, .. } => radius * (end - start).abs(),
        }
    }

    fn orientation(&self) -> f64 {
        match *self {
            CurveSegment::Line { .. } => 0.0,
            CurveSegment::Arc { start, end, .. } => (end - start).signum(),
        }
    }

    /// Point at arc length `t`.
    pub fn point(&self, t: f64) -> Point {
        match *self {
            CurveSegment::Line { a, b } => {
                let l = self.length();
                [a[0] + (b[0] - a[0]) * t / l, a[1] + (b[1] - a[1]) * t / l]
            }
            CurveSegment::Arc { center, radius, start, .. } => {
                let phi = start + self.orientation() * t / radius;
                [center[0] + radius * phi.cos(), center[1] + radius * phi.sin()]
            }
        }
    }

    /// Unit tangent at arc length `t`.
    pub fn tangent(&self, t: f64) -> Point {
        match *self {
            CurveSegment::Line { a, b } => {
                let d = sub(b, a);
                let l = norm(d);
                [d[0] / l, d[1] / l]
            }
            CurveSegment::Arc { radius, start, .. } => {
                let o = self.orientation();
                let phi = start + o * t / radius;
                [-o * phi.sin(), o * phi.cos()]
            }
        }
    }

    /// Unit normal pointing into the envelope.
    pub fn inward(&self, t: f64) -> Point {
        left(self.tangent(t))
    }

    /// Area element of the `(t, s)` envelope coordinates.
    fn jacobian(&self, s: f64) -> f64 {
        match *self {
            CurveSegment::Line { .. } => 1.0,
            CurveSegment::Arc { radius, .. } => 1.0 - self.orientation() * s / radius,
        }
    }

    fn at(&self, t: f64, s: f64) -> Point {
        let (x, nu) = (self.point(t), self.inward(t));
        [x[0] + s * nu[0], x[1] + s * nu[1]]
    }

    /// Foot parameters `(t, s)` with `y = x(t) + s ν(t)`, if the orthogonal
    /// projection of `y` falls on the segment. `s` is signed.
    fn foot(&self, y: Point) -> Option<(f64, f64)> {
        let l = self.length();
        let tol = 1e-12 * l.max(1.0);
        match *self {
            CurveSegment::Line { a, .. } => {
                let tau = self.tangent(0.0);
                let d = sub(y, a);
                let t = dot(d, tau);
                (t >= -tol && t <= l + tol).then(|| (t.clamp(0.0, l), dot(d, left(tau))))
            }
            CurveSegment::Arc { center, radius, start, end } => {
                let v = sub(y, center);
                let rho = norm(v);
                if rho == 0.0 {
                    return None;
                }
                let o = self.orientation();
                let span = (end - start).abs();
                let mut delta = (o * (v[1].atan2(v[0]) - start)).rem_euclid(TAU);
                if delta > span + tol / radius {
                    if TAU - delta <= tol / radius {
                        delta = 0.0;
                    } else {
                        return None;
                    }
                }
                Some((radius * delta.min(span), o * (radius - rho)))
            }
        }
    }
}

impl CurveSegment {
    /// Distance from `y` to the segment, with the foot parameters when the
    /// nearest point is the orthogonal projection.
    fn distance(&self, y: Point) -> (f64, Option<(f64, f64)>) {
        match self.foot(y) {
            Some((t, s)) => (s.abs(), Some((t, s))),
            None => {
                let (a, b) = (self.point(0.0), self.point(self.length()));
                (norm(sub(y, a)).min(norm(sub(y, b))), None)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Corner {
    /// The corner joins segment `before` (its end) to segment `after`.
    pub before: usize,
    pub after: usize,
    pub point: Point,
    /// Signed turning angle of the tangent, positive to the left.
    pub turn: f64,
    /// Angle on the outward-normal side, `π + turn`.
    pub theta: f64,
}

impl Corner {
    pub fn has_sector(&self) -> bool {
        self.turn < 0.0
    }

    /// Half opening angle `ψ = (π − θ)/2` of the sector.
    pub fn half_angle(&self) -> f64 {
        (PI - self.theta) / 2.0
    }
}

#[derive(Clone, Debug)]
pub struct PiecewiseCurve {
    segments: Vec<CurveSegment>,
    closed: bool,
    corners: Vec<Corner>,
    offsets: Vec<f64>,
}

impl PiecewiseCurve {
    pub fn new(segments: Vec<CurveSegment>, closed: bool) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidArgument("curve has no segments".into()));
        }
        for (i, s) in segments.iter().enumerate() {
            if let CurveSegment::Arc { radius, .. } = s {
                if !(*radius > 0.0) {
                    return Err(Error::InvalidArgument(format!("segment {i}: arc radius must be positive")));
                }
            }
            if !(s.length() > 0.0) || !s.length().is_finite() {
                return Err(Error::InvalidArgument(format!("segment {i} has no length")));
            }
        }
        let n = segments.len();
        let joints = if closed { n } else { n - 1 };
        let mut corners = Vec::new();
        for i in 0..joints {
            let (a, b) = (&segments[i], &segments[(i + 1) % n]);
            let (p, q) = (a.point(a.length()), b.point(0.0));
            let scale = 1.0 + norm(p);
            if norm(sub(p, q)) > JOIN_TOL * scale {
                return Err(Error::InvalidArgument(format!("segments {i} and {} are not connected", (i + 1) % n)));
            }
            let (ta, tb) = (a.tangent(a.length()), b.tangent(0.0));
            let turn = cross(ta, tb).atan2(dot(ta, tb));
            if turn.abs() < SMOOTH_TURN {
                continue;
            }
            if turn.abs() > PI - SMOOTH_TURN {
                return Err(Error::InvalidArgument(format!("cusp between segments {i} and {}", (i + 1) % n)));
            }
            corners.push(Corner {
                before: i,
                after: (i + 1) % n,
                point: p,
                turn,
                theta: PI + turn,
            });
        }
        let mut offsets = vec![0.0];
        for s in &segments {
            offsets.push(offsets.last().unwrap() + s.length());
        }
        Ok(PiecewiseCurve {
            segments,
            closed,
            corners,
            offsets,
        })
    }

    pub fn segments(&self) -> &[CurveSegment] {
        &self.segments
    }

    pub fn corners(&self) -> &[Corner] {
        &self.corners
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn length(&self) -> f64 {
        *self.offsets.last().unwrap()
    }

    /// Global arc length of local parameter `t` on segment `i`.
    pub fn arc_position(&self, i: usize, t: f64) -> f64 {
        self.offsets[i] + t
    }

    fn adjacent(&self, i: usize, j: usize) -> bool {
        let n = self.segments.len();
        i == j || (i + 1) % n == j && (self.closed || i + 1 < n) || (j + 1) % n == i && (self.closed || j + 1 < n)
    }

    /// Corner joining segments `i` and `j` nearest to `y` (two segments of a
    /// closed curve meet twice).
    fn corner_between(&self, i: usize, j: usize, y: Point) -> Option<usize> {
        self.corners
            .iter()
            .enumerate()
            .filter(|(_, c)| (c.before == i && c.after == j) || (c.before == j && c.after == i))
            .min_by(|a, b| norm(sub(a.1.point, y)).total_cmp(&norm(sub(b.1.point, y))))
            .map(|(k, _)| k)
    }

    fn corner_at_end(&self, i: usize) -> Option<&Corner> {
        self.corners.iter().find(|c| c.before == i)
    }

    fn corner_at_start(&self, i: usize) -> Option<&Corner> {
        self.corners.iter().find(|c| c.after == i)
    }

    /// Largest admissible `ε`: half the smallest arc radius, half the
    /// smallest distance between non-adjacent segments, and short enough
    /// that each overlap wedge uses at most half of its segments.
    pub fn max_eps(&self) -> f64 {
        let mut bound = f64::INFINITY;
        for s in &self.segments {
            if let CurveSegment::Arc { radius, .. } = s {
                bound = bound.min(radius / 2.0);
            }
        }
        const SAMPLES: usize = 256;
        let samples: Vec<Vec<Point>> = self
            .segments
            .iter()
            .map(|s| (0..=SAMPLES).map(|k| s.point(s.length() * k as f64 / SAMPLES as f64)).collect())
            .collect();
        for i in 0..self.segments.len() {
            for j in i + 1..self.segments.len() {
                if self.adjacent(i, j) {
                    continue;
                }
                for p in &samples[i] {
                    for q in &samples[j] {
                        bound = bound.min(norm(sub(*p, *q)) / 2.0);
                    }
                }
            }
        }
        for c in self.corners.iter().filter(|c| !c.has_sector()) {
            let interior = PI - c.turn;
            let shortest = self.segments[c.before].length().min(self.segments[c.after].length());
            bound = bound.min(shortest * (interior / 2.0).tan() / 2.0);
        }
        bound
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Region {
    NormalEnvelope { segment: usize, t: f64, s: f64 },
    /// Part of the overlap of two normal envelopes at a corner assigned to
    /// `segment` by the bisector (closest-segment) rule.
    OverlapWedge { corner: usize, segment: usize, t: f64, s: f64 },
    /// Polar coordinates about the corner; `angle ∈ [−ψ, ψ]` from the
    /// sector bisector.
    CornerSector { corner: usize, r: f64, angle: f64 },
}

#[derive(Clone, Debug)]
pub struct EnvelopeDecomposition {
    curve: PiecewiseCurve,
    eps: f64,
}

impl EnvelopeDecomposition {
    pub fn new(curve: PiecewiseCurve, eps: f64) -> Result<Self> {
        let max = curve.max_eps();
        if !(eps > 0.0 && eps <= max) {
            return Err(Error::InvalidArgument(format!("ε = {eps} outside (0, {max}]")));
        }
        Ok(EnvelopeDecomposition { curve, eps })
    }

    pub fn curve(&self) -> &PiecewiseCurve {
        &self.curve
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Region of `y`. The nearest point of `Γ` decides: a projection onto
    /// segment `i` from the `Ω_p` side gives its envelope (an overlap wedge
    /// if `y` is also in the envelope of the neighbour across a left-turn
    /// corner), a right-turn corner gives its sector. Ties go to the lower
    /// segment index.
    pub fn classify(&self, y: Point) -> Result<Region> {
        let eps_tol = self.eps * (1.0 + 1e-12);
        let tie = 1e-14 * self.eps;
        let dist: Vec<(f64, Option<(f64, f64)>)> = self.curve.segments.iter().map(|s| s.distance(y)).collect();
        let mut best = 0;
        for (i, d) in dist.iter().enumerate().skip(1) {
            let (db, fb) = dist[best];
            // Prefer projections over endpoints at equal distance.
            if d.0 < db - tie || (d.0 <= db + tie && fb.is_none() && d.1.is_some()) {
                best = i;
            }
        }
        let (d, foot) = dist[best];
        if d > eps_tol {
            return Err(Error::OutsideEnvelope(y[0], y[1]));
        }
        if let Some((t, s)) = foot {
            if s < -tie {
                return Err(Error::OutsideEnvelope(y[0], y[1]));
            }
            let s = s.max(0.0);
            let neighbour = dist.iter().enumerate().find_map(|(j, dj)| {
                let (_, sj) = dj.1?;
                (j != best && sj >= -tie && sj <= eps_tol).then_some(j)
            });
            if let Some(c) = neighbour.and_then(|j| self.curve.corner_between(best, j, y)) {
                if !self.curve.corners[c].has_sector() {
                    return Ok(Region::OverlapWedge { corner: c, segment: best, t, s });
                }
            }
            return Ok(Region::NormalEnvelope { segment: best, t, s });
        }
        for (k, c) in self.curve.corners.iter().enumerate() {
            if !c.has_sector() {
                continue;
            }
            let v = sub(y, c.point);
            let r = norm(v);
            if r > eps_tol {
                continue;
            }
            let bis = self.sector_bisector(c);
            let angle = cross(bis, v).atan2(dot(bis, v));
            if r == 0.0 || angle.abs() <= c.half_angle() + 1e-12 {
                let angle = if r == 0.0 { 0.0 } else { angle };
                return Ok(Region::CornerSector { corner: k, r, angle });
            }
        }
        Err(Error::OutsideEnvelope(y[0], y[1]))
    }

    fn sector_bisector(&self, c: &Corner) -> Point {
        let a = self.curve.segments[c.before].inward(self.curve.segments[c.before].length());
        let b = self.curve.segments[c.after].inward(0.0);
        let m = [a[0] + b[0], a[1] + b[1]];
        let l = norm(m);
        [m[0] / l, m[1] / l]
    }

    /// Point of the region coordinates.
    pub fn region_point(&self, region: &Region) -> Point {
        match *region {
            Region::NormalEnvelope { segment, t, s } | Region::OverlapWedge { segment, t, s, .. } => {
                self.curve.segments[segment].at(t, s)
            }
            Region::CornerSector { corner, r, angle } => {
                let c = &self.curve.corners[corner];
                let b = self.sector_bisector(c);
                let (sn, cs) = angle.sin_cos();
                [c.point[0] + r * (cs * b[0] - sn * b[1]), c.point[1] + r * (sn * b[0] + cs * b[1])]
            }
        }
    }

    /// `n_{Γε}` on a classified region.
    pub fn region_normal(&self, region: &Region) -> Point {
        match *region {
            Region::NormalEnvelope { segment, t, .. } | Region::OverlapWedge { segment, t, .. } => {
                let nu = self.curve.segments[segment].inward(t);
                [-nu[0], -nu[1]]
            }
            Region::CornerSector { corner, angle, .. } => {
                let b = self.sector_bisector(&self.curve.corners[corner]);
                let (sn, cs) = angle.sin_cos();
                [-(cs * b[0] - sn * b[1]), -(sn * b[0] + cs * b[1])]
            }
        }
    }

    pub fn normal_field(&self, y: Point) -> Result<Point> {
        Ok(self.region_normal(&self.classify(y)?))
    }

    /// Global arc length whose value `E_ε w` copies on this region.
    pub fn region_foot(&self, region: &Region) -> f64 {
        match *region {
            Region::NormalEnvelope { segment, t, .. } | Region::OverlapWedge { segment, t, .. } => {
                self.curve.arc_position(segment, t)
            }
            Region::CornerSector { corner, .. } => {
                let c = &self.curve.corners[corner];
                self.curve.arc_position(c.after, 0.0)
            }
        }
    }

    /// `(E_ε w)(y)` for `w` given on global arc length.
    pub fn extend(&self, w: impl Fn(f64) -> f64, y: Point) -> Result<f64> {
        Ok(w(self.region_foot(&self.classify(y)?)))
    }
}
