//! Lagrange bases on triangles in barycentric coordinates and the quadrature
//! rules used by assembly.

use crate::mesh::Point;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    P0,
    P1,
    P2,
    /// Two-component P2; dofs are blocked by component.
    VectorP2,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::P0 => "P0",
            Family::P1 => "P1",
            Family::P2 => "P2",
            Family::VectorP2 => "P2^2",
        }
    }

    /// Local basis functions per scalar component on a triangle.
    pub fn local_dim(self) -> usize {
        match self {
            Family::P0 => 1,
            Family::P1 => 3,
            Family::P2 | Family::VectorP2 => 6,
        }
    }

    pub fn components(self) -> usize {
        if self == Family::VectorP2 {
            2
        } else {
            1
        }
    }
}

/// Symmetric 6-point rule, exact for total degree 4. Barycentric points and
/// weights as fractions of the cell area.
pub const TRIANGLE_RULE: [([f64; 3], f64); 6] = {
    const A: f64 = 0.445948490915965;
    const B: f64 = 0.091576213509771;
    const WA: f64 = 0.223381589678011;
    const WB: f64 = 0.109951743655322;
    [
        ([A, A, 1.0 - 2.0 * A], WA),
        ([A, 1.0 - 2.0 * A, A], WA),
        ([1.0 - 2.0 * A, A, A], WA),
        ([B, B, 1.0 - 2.0 * B], WB),
        ([B, 1.0 - 2.0 * B, B], WB),
        ([1.0 - 2.0 * B, B, B], WB),
    ]
};

/// 3-point Gauss–Legendre on [0, 1] (exact to degree 5); weights sum to 1.
pub const SEGMENT_RULE: [(f64, f64); 3] = {
    const D: f64 = 0.387298334620741688; // sqrt(3/5) / 2
    [(0.5 - D, 5.0 / 18.0), (0.5, 8.0 / 18.0), (0.5 + D, 5.0 / 18.0)]
};

/// Gauss–Legendre nodes and weights on [0, 1] of any order, by Newton
/// iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n > 0);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (1.0 - x), 0.5 * w));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Geometry of one triangle: area and barycentric gradients.
#[derive(Clone, Copy, Debug)]
pub struct TriangleGeometry {
    pub area: f64,
    pub grad_bary: [Point; 3],
}

impl TriangleGeometry {
    pub fn new([p0, p1, p2]: [Point; 3]) -> Self {
        let det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
        TriangleGeometry {
            area: 0.5 * det,
            grad_bary: [
                [(p1[1] - p2[1]) / det, (p2[0] - p1[0]) / det],
                [(p2[1] - p0[1]) / det, (p0[0] - p2[0]) / det],
                [(p0[1] - p1[1]) / det, (p1[0] - p0[0]) / det],
            ],
        }
    }
}

/// Local edges of the P2 element: edge dof `3 + k` sits between these vertices.
pub const P2_EDGES: [[usize; 2]; 3] = [[0, 1], [1, 2], [2, 0]];

/// Values of the scalar basis of `family` at barycentric point `l`.
pub fn basis_values(family: Family, l: [f64; 3], out: &mut [f64]) {
    match family {
        Family::P0 => out[0] = 1.0,
        Family::P1 => out[..3].copy_from_slice(&l),
        Family::P2 | Family::VectorP2 => {
            for k in 0..3 {
                out[k] = l[k] * (2.0 * l[k] - 1.0);
            }
            for (k, [a, b]) in P2_EDGES.iter().enumerate() {
                out[3 + k] = 4.0 * l[*a] * l[*b];
            }
        }
    }
}

/// Gradients of the scalar basis of `family` at barycentric point `l`.
pub fn basis_gradients(family: Family, geo: &TriangleGeometry, l: [f64; 3], out: &mut [Point]) {
    let g = &geo.grad_bary;
    match family {
        Family::P0 => out[0] = [0.0, 0.0],
        Family::P1 => out[..3].copy_from_slice(g),
        Family::P2 | Family::VectorP2 => {
            for k in 0..3 {
                let s = 4.0 * l[k] - 1.0;
                out[k] = [s * g[k][0], s * g[k][1]];
            }
            for (k, &[a, b]) in P2_EDGES.iter().enumerate() {
                out[3 + k] = [
                    4.0 * (l[a] * g[b][0] + l[b] * g[a][0]),
                    4.0 * (l[a] * g[b][1] + l[b] * g[a][1]),
                ];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn monomial_integral_reference(p: u32, q: u32) -> f64 {
        // ∫ x^p y^q over the unit right triangle = p! q! / (p + q + 2)!
        let f = |n: u32| (1..=n).map(f64::from).product::<f64>();
        f(p) * f(q) / f(p + q + 2)
    }

    #[test]
    fn triangle_rule_exact_to_degree_four() {
        for p in 0..=4u32 {
            for q in 0..=(4 - p) {
                // on the reference triangle x = l1, y = l2, area 1/2
                let approx: f64 = TRIANGLE_RULE
                    .iter()
                    .map(|(l, w)| 0.5 * w * l[1].powi(p as i32) * l[2].powi(q as i32))
                    .sum();
                let exact = monomial_integral_reference(p, q);
                assert!((approx - exact).abs() < 1e-14, "x^{p} y^{q}: {approx} vs {exact}");
            }
        }
    }

    #[test]
    fn segment_rules_exact() {
        for k in 0..=5 {
            let approx: f64 = SEGMENT_RULE.iter().map(|(t, w)| w * t.powi(k)).sum();
            assert!((approx - 1.0 / (k + 1) as f64).abs() < 1e-15);
        }
        for n in [1, 2, 5, 12] {
            let rule = gauss_legendre(n);
            for k in 0..(2 * n) as i32 {
                let approx: f64 = rule.iter().map(|(t, w)| w * t.powi(k)).sum();
                assert!((approx - 1.0 / (k + 1) as f64).abs() < 1e-14, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn p2_basis_is_nodal_and_partitions_unity() {
        let nodes = [
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.5, 0.5, 0.0],
            [0.0, 0.5, 0.5],
            [0.5, 0.0, 0.5],
        ];
        let mut v = [0.0; 6];
        for (i, &l) in nodes.iter().enumerate() {
            basis_values(Family::P2, l, &mut v);
            for (j, &x) in v.iter().enumerate() {
                assert!((x - if i == j { 1.0 } else { 0.0 }).abs() < 1e-15);
            }
        }
        basis_values(Family::P2, [0.2, 0.3, 0.5], &mut v);
        assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let geo = TriangleGeometry::new([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        let mut g = [[0.0; 2]; 6];
        basis_gradients(Family::P2, &geo, [0.2, 0.3, 0.5], &mut g);
        let sum = g.iter().fold([0.0, 0.0], |s, x| [s[0] + x[0], s[1] + x[1]]);
        assert!(sum[0].abs() < 1e-14 && sum[1].abs() < 1e-14);
    }
}
