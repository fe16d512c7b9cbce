use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dense::{symmetric_eigen, DenseMatrix};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LanczosOptions {
    /// Relative Ritz residual required for both extremes.
    pub tol: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            tol: 1e-8,
            max_iterations: 1000,
            seed: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LanczosExtremes {
    pub lambda_min_abs: f64,
    pub lambda_max_abs: f64,
    pub iterations: usize,
    /// `false` when the iteration cap was hit before both extremes settled.
    pub converged: bool,
}

/// Extreme absolute eigenvalues of the pencil `A x = λ B x` (B SPD) by
/// Lanczos in the `B`-inner product with full reorthogonalization.
/// `apply_a(x, y)` sets `y = A x`; `apply_binv(r, z)` sets `z = B⁻¹ r`.
pub fn lanczos_extremes(
    apply_a: impl Fn(&[f64], &mut [f64]),
    apply_binv: impl Fn(&[f64], &mut [f64]),
    n: usize,
    opts: LanczosOptions,
) -> Result<LanczosExtremes> {
    if n == 0 {
        return Err(Error::InvalidArgument("empty operator".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut y: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut z = vec![0.0; n];
    apply_binv(&y, &mut z);
    let mut beta = dot(&y, &z).sqrt();
    if !(beta > 0.0) {
        return Err(Error::Breakdown("preconditioner is not positive definite".into()));
    }

    // v_j are B-orthonormal, u_j = B v_j
    let mut vs: Vec<Vec<f64>> = Vec::new();
    let mut us: Vec<Vec<f64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let cap = opts.max_iterations.min(n).max(1);
    let mut next_check = 8usize;
    let mut last = None;
    for k in 0..cap {
        let v: Vec<f64> = z.iter().map(|x| x / beta).collect();
        let u: Vec<f64> = y.iter().map(|x| x / beta).collect();
        apply_a(&v, &mut w);
        let alpha = dot(&v, &w);
        for (wi, ui) in w.iter_mut().zip(&u) {
            *wi -= alpha * ui;
        }
        if let Some(up) = us.last() {
            let b = *betas.last().unwrap();
            for (wi, ui) in w.iter_mut().zip(up) {
                *wi -= b * ui;
            }
        }
        vs.push(v);
        us.push(u);
        alphas.push(alpha);
        for _ in 0..2 {
            for (vi, ui) in vs.iter().zip(&us) {
                let c = dot(vi, &w);
                for (wj, uj) in w.iter_mut().zip(ui) {
                    *wj -= c * uj;
                }
            }
        }
        apply_binv(&w, &mut z);
        let wz = dot(&w, &z);
        let scale = alphas.iter().fold(0.0f64, |m, a| m.max(a.abs())).max(f64::MIN_POSITIVE);
        let invariant = !(wz > 0.0) || wz.sqrt() <= 1e-13 * scale;
        beta = if invariant { 0.0 } else { wz.sqrt() };
        let steps = k + 1;
        if invariant || steps >= next_check || steps == cap {
            next_check = (steps as f64 * 1.25).ceil() as usize + 1;
            let est = ritz_extremes(&alphas, &betas, beta)?;
            let done = invariant
                || (est.res_min <= opts.tol * est.min_abs && est.res_max <= opts.tol * est.max_abs);
            last = Some(LanczosExtremes {
                lambda_min_abs: est.min_abs,
                lambda_max_abs: est.max_abs,
                iterations: steps,
                converged: done || steps == n,
            });
            if done {
                break;
            }
        }
        if invariant {
            break;
        }
        betas.push(beta);
        std::mem::swap(&mut y, &mut w);
    }
    Ok(last.expect("at least one Ritz check"))
}

struct RitzEstimate {
    min_abs: f64,
    max_abs: f64,
    res_min: f64,
    res_max: f64,
}

fn ritz_extremes(alphas: &[f64], betas: &[f64], beta_next: f64) -> Result<RitzEstimate> {
    let k = alphas.len();
    let t = DenseMatrix::from_fn(k, k, |i, j| {
        if i == j {
            alphas[i]
        } else if i + 1 == j {
            betas[i]
        } else if j + 1 == i {
            betas[j]
        } else {
            0.0
        }
    });
    let (theta, s) = symmetric_eigen(&t)?;
    let imax = (0..k).max_by(|&a, &b| theta[a].abs().total_cmp(&theta[b].abs())).unwrap();
    let imin = (0..k).min_by(|&a, &b| theta[a].abs().total_cmp(&theta[b].abs())).unwrap();
    Ok(RitzEstimate {
        min_abs: theta[imin].abs(),
        max_abs: theta[imax].abs(),
        res_min: beta_next * s[(k - 1, imin)].abs(),
        res_max: beta_next * s[(k - 1, imax)].abs(),
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense_generalized_eigenvalues;

    #[test]
    fn diagonal_with_identity() {
        let d: Vec<f64> = (1..=10).map(f64::from).collect();
        let r = lanczos_extremes(
            |x, y| {
                for i in 0..10 {
                    y[i] = d[i] * x[i];
                }
            },
            |x, y| y.copy_from_slice(x),
            10,
            LanczosOptions::default(),
        )
        .unwrap();
        assert!(r.converged);
        assert!((r.lambda_min_abs - 1.0).abs() < 1e-10);
        assert!((r.lambda_max_abs - 10.0).abs() < 1e-10);
    }

    #[test]
    fn small_saddle_matches_dense() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let vals = dense_generalized_eigenvalues(&a, &DenseMatrix::identity(2)).unwrap();
        let r = lanczos_extremes(
            |x, y| y.copy_from_slice(&a.matvec(x)),
            |x, y| y.copy_from_slice(x),
            2,
            LanczosOptions::default(),
        )
        .unwrap();
        let min = vals.iter().fold(f64::MAX, |m, v| m.min(v.abs()));
        let max = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!((r.lambda_min_abs - min).abs() < 1e-12);
        assert!((r.lambda_max_abs - max).abs() < 1e-12);
    }

    #[test]
    fn weighted_inner_product() {
        // A = diag(2, 6, 12), B = diag(1, 2, 3) → λ = 2, 3, 4
        let a = [2.0, 6.0, 12.0];
        let b = [1.0, 2.0, 3.0];
        let r = lanczos_extremes(
            |x, y| (0..3).for_each(|i| y[i] = a[i] * x[i]),
            |x, y| (0..3).for_each(|i| y[i] = x[i] / b[i]),
            3,
            LanczosOptions::default(),
        )
        .unwrap();
        assert!((r.lambda_min_abs - 2.0).abs() < 1e-12 && (r.lambda_max_abs - 4.0).abs() < 1e-12);
    }
}
