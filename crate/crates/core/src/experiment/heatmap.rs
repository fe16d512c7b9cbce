//! Static small-multiples SVG over the `(μ, K)` grid.

use std::fmt::Write as _;

use super::record::RunRecord;
use crate::error::{Error, Result};

const PANEL_W: f64 = 220.0;
const PANEL_H: f64 = 160.0;
const MARGIN: f64 = 40.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeatmapValue {
    Cond,
    Iterations,
}

impl std::str::FromStr for HeatmapValue {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cond" => Ok(HeatmapValue::Cond),
            "iterations" => Ok(HeatmapValue::Iterations),
            _ => Err(Error::InvalidArgument(format!("unknown value column `{s}` (cond | iterations)"))),
        }
    }
}

impl HeatmapValue {
    fn name(self) -> &'static str {
        match self {
            HeatmapValue::Cond => "cond",
            HeatmapValue::Iterations => "iterations",
        }
    }

    fn get(self, r: &RunRecord) -> Option<f64> {
        match self {
            HeatmapValue::Cond => r.cond,
            HeatmapValue::Iterations => r.iterations.map(|i| i as f64),
        }
    }
}

fn key(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| x.to_string())
}

fn distinct(values: impl Iterator<Item = String>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for v in values {
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

/// Panel grid with `μ` down the rows and `K` across the columns; each panel
/// plots `value` against level, one line per (pairing, bc, precond).
pub fn render_heatmap(records: &[RunRecord], value: HeatmapValue) -> Result<String> {
    if records.is_empty() {
        return Err(Error::InvalidArgument("no rows to plot".into()));
    }
    let mus = distinct(records.iter().map(|r| key(r.mu)));
    let ks = distinct(records.iter().map(|r| key(r.k)));
    let series = distinct(records.iter().map(|r| format!("{} {} {}", r.pairing, r.bc, r.precond)));
    let (lmin, lmax) = records
        .iter()
        .fold((u32::MAX, 0), |(a, b), r| (a.min(r.level), b.max(r.level)));
    let vals: Vec<f64> = records.iter().filter_map(|r| value.get(r)).collect();
    let vmax = vals.iter().copied().fold(0.0f64, f64::max).max(1.0);

    let width = MARGIN + ks.len() as f64 * (PANEL_W + MARGIN);
    let height = 2.0 * MARGIN + mus.len() as f64 * (PANEL_H + MARGIN) + 16.0 * series.len() as f64;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<text x="{MARGIN}" y="20" font-size="14">{} vs level</text>"#, value.name());
    for (i, mu) in mus.iter().enumerate() {
        for (j, k) in ks.iter().enumerate() {
            let x0 = MARGIN + j as f64 * (PANEL_W + MARGIN);
            let y0 = MARGIN + i as f64 * (PANEL_H + MARGIN);
            let _ = writeln!(
                svg,
                r##"<g class="panel"><rect x="{x0}" y="{y0}" width="{PANEL_W}" height="{PANEL_H}" fill="none" stroke="#888"/>"##
            );
            let _ = writeln!(svg, r#"<text x="{x0}" y="{}">mu={mu} K={k}</text>"#, y0 - 4.0);
            let px = |level: u32| {
                let span = (lmax - lmin).max(1) as f64;
                x0 + 10.0 + (PANEL_W - 20.0) * (level - lmin) as f64 / span
            };
            let py = |v: f64| y0 + PANEL_H - 10.0 - (PANEL_H - 20.0) * v / vmax;
            for (s, name) in series.iter().enumerate() {
                let color = COLORS[s % COLORS.len()];
                let pts: Vec<(f64, f64)> = records
                    .iter()
                    .filter(|r| key(r.mu) == *mu && key(r.k) == *k)
                    .filter(|r| format!("{} {} {}", r.pairing, r.bc, r.precond) == *name)
                    .filter_map(|r| value.get(r).map(|v| (px(r.level), py(v))))
                    .collect();
                if pts.len() > 1 {
                    let path: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.1},{y:.1}")).collect();
                    let _ = writeln!(
                        svg,
                        r#"<polyline points="{}" fill="none" stroke="{color}"/>"#,
                        path.join(" ")
                    );
                }
                for (x, y) in pts {
                    let _ = writeln!(svg, r#"<circle class="point" cx="{x:.1}" cy="{y:.1}" r="3" fill="{color}"/>"#);
                }
            }
            let _ = writeln!(
                svg,
                r#"<text x="{x0}" y="{}">level {lmin}..{lmax}, max {}</text></g>"#,
                y0 + PANEL_H + 14.0,
                vmax
            );
        }
    }
    let ly = 2.0 * MARGIN + mus.len() as f64 * (PANEL_H + MARGIN) - 20.0;
    for (s, name) in series.iter().enumerate() {
        let color = COLORS[s % COLORS.len()];
        let _ = writeln!(
            svg,
            r#"<text x="{MARGIN}" y="{}" fill="{color}">{name}</text>"#,
            ly + 16.0 * s as f64
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
