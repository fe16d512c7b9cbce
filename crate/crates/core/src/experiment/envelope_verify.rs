//! Exactness and convergence data for the envelope operators.

use std::f64::consts::PI;
use std::io::Write;

use super::config::{MeshFamily, ENVELOPE_CASES};
use crate::envelope::{fe_scaling_probe, CurveSegment, EnvelopeDecomposition, PiecewiseCurve, ProbeField};
use crate::error::{Error, Result};
use crate::mesh::Point;

pub const VERIFY_COLUMNS: [&str; 5] = ["case", "eps_or_h", "measured", "expected", "error"];

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyRow {
    pub case: String,
    /// Empty for fitted-slope rows.
    pub eps_or_h: Option<f64>,
    pub measured: f64,
    pub expected: f64,
    pub error: f64,
}

impl VerifyRow {
    fn abs(case: &str, x: Option<f64>, measured: f64, expected: f64) -> Self {
        VerifyRow {
            case: case.into(),
            eps_or_h: x,
            measured,
            expected,
            error: (measured - expected).abs(),
        }
    }

    fn rel(case: &str, x: Option<f64>, measured: f64, expected: f64) -> Self {
        VerifyRow {
            error: (measured / expected - 1.0).abs(),
            ..Self::abs(case, x, measured, expected)
        }
    }
}

const QUAD_N: usize = 8;

fn line(a: Point, b: Point) -> CurveSegment {
    CurveSegment::line(a, b)
}

/// `u = −x w(y)` on `x > 0`: `(1/ε)∫ ∇u·n E_ε w` equals `∫_Γ w²` for every ε.
fn halfplane() -> Result<Vec<VerifyRow>> {
    let w = |y: f64| 1.0 + y - y * y;
    let dw = |y: f64| 1.0 - 2.0 * y;
    let mut rows = Vec::new();
    for eps in [0.1, 0.01, 0.001] {
        let curve = PiecewiseCurve::new(vec![line([0.0, 1.0], [0.0, 0.0])], false)?;
        let env = EnvelopeDecomposition::new(curve, eps)?;
        let got = env.dnn_eps(|p| [-w(p[1]), -p[0] * dw(p[1])], |s| w(1.0 - s), QUAD_N)?;
        rows.push(VerifyRow::abs("halfplane", Some(eps), got, 41.0 / 30.0));
    }
    Ok(rows)
}

/// Unit disk: `u = r w(θ)` gives `(1 − ε/2) ∫ w²`; the trace pairing of
/// `v = 1 + x` with itself converges to `∫_Γ v²` at first order.
fn disk() -> Result<Vec<VerifyRow>> {
    let circle = || PiecewiseCurve::new(vec![CurveSegment::arc([0.0, 0.0], 1.0, 0.0, 2.0 * PI)], true);
    let mut rows = Vec::new();
    for eps in [0.1, 0.01, 0.001] {
        let env = EnvelopeDecomposition::new(circle()?, eps)?;
        let grad = |p: Point| {
            let r = p[0].hypot(p[1]);
            [1.0 + 2.0 * p[0] / r, 2.0 * p[1] / r]
        };
        let got = env.dnn_eps(grad, |t| t.cos() + 2.0, QUAD_N)?;
        rows.push(VerifyRow::rel("disk", Some(eps), got, (1.0 - eps / 2.0) * 9.0 * PI));
    }
    let v = |p: Point| 1.0 + p[0];
    let mut errs = Vec::new();
    for eps in [1e-1, 1e-2, 1e-3, 1e-4] {
        let env = EnvelopeDecomposition::new(circle()?, eps)?;
        let got = env.trace_pair_eps(v, v, QUAD_N)?;
        let row = VerifyRow::abs("disk-trace-pair", Some(eps), got, 3.0 * PI);
        errs.push((eps, row.error));
        rows.push(row);
    }
    let slope = crate::envelope::fit_slope(errs.into_iter());
    rows.push(VerifyRow::abs("disk-trace-pair-slope", None, slope, 1.0));
    Ok(rows)
}

/// Two unit edges meeting at a right angle, envelope on either side:
/// `|Γ_ε|/ε = 2 + πε/4` with a sector, `2 − ε` with an overlap wedge.
fn square_corner() -> Result<Vec<VerifyRow>> {
    let mut rows = Vec::new();
    for eps in [0.1, 0.01] {
        let sector = PiecewiseCurve::new(vec![line([1.0, 0.0], [0.0, 0.0]), line([0.0, 0.0], [0.0, 1.0])], false)?;
        let env = EnvelopeDecomposition::new(sector, eps)?;
        let got = env.trace_pair_eps(|_| 1.0, |_| 1.0, QUAD_N)?;
        rows.push(VerifyRow::abs("square-corner-sector", Some(eps), got, 2.0 + PI * eps / 4.0));

        let wedge = PiecewiseCurve::new(vec![line([0.0, 1.0], [0.0, 0.0]), line([0.0, 0.0], [1.0, 0.0])], false)?;
        let env = EnvelopeDecomposition::new(wedge, eps)?;
        let got = env.trace_pair_eps(|_| 1.0, |_| 1.0, QUAD_N)?;
        rows.push(VerifyRow::abs("square-corner-wedge", Some(eps), got, 2.0 - eps));
    }
    Ok(rows)
}

/// Ratio `‖∂ₙ,ε u_h‖ / ‖u_h‖_{H¹}` on levels 3..7 against the `h^(−1/2)`
/// law anchored at the coarsest level, then the fitted exponent.
fn fe_scaling() -> Result<Vec<VerifyRow>> {
    let rep = fe_scaling_probe(&MeshFamily::Structured, &[3, 4, 5, 6, 7], ProbeField::BoundaryStrip)?;
    let (_, h0, r0) = rep.rows[0];
    let mut rows: Vec<VerifyRow> = rep
        .rows
        .iter()
        .map(|&(_, h, r)| VerifyRow::rel("fe-scaling", Some(h), r, r0 * (h / h0).powf(-0.5)))
        .collect();
    rows.push(VerifyRow::abs("fe-scaling-slope", None, rep.slope, -0.5));
    Ok(rows)
}

pub fn envelope_verify(case: &str) -> Result<Vec<VerifyRow>> {
    match case {
        "halfplane" => halfplane(),
        "disk" => disk(),
        "square-corner" => square_corner(),
        "fe-scaling" => fe_scaling(),
        "all" => {
            let mut rows = Vec::new();
            for c in ENVELOPE_CASES {
                rows.extend(envelope_verify(c)?);
            }
            Ok(rows)
        }
        _ => Err(Error::InvalidArgument(format!(
            "unknown envelope case `{case}` (expected one of {}, all)",
            ENVELOPE_CASES.join(", ")
        ))),
    }
}

pub fn write_verify_rows(out: impl Write, rows: &[VerifyRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(VERIFY_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.case.clone(),
            r.eps_or_h.map_or_else(String::new, |x| x.to_string()),
            r.measured.to_string(),
            r.expected.to_string(),
            r.error.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
