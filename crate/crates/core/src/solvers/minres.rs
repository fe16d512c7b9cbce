use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{dot, factorize, FactorKind, Factorization};
use crate::problems::{BlockSystem, NormBlock};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MinresConfig {
    pub rtol: f64,
    pub atol: f64,
    pub max_iterations: usize,
    /// Seed of the ChaCha8 stream drawing the uniform(−1, 1) initial guess.
    pub rng_seed: u64,
}

impl Default for MinresConfig {
    fn default() -> Self {
        MinresConfig {
            rtol: 1e-8,
            atol: 1e-10,
            max_iterations: 1000,
            rng_seed: 1,
        }
    }
}

impl MinresConfig {
    fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0) || !(self.atol > 0.0) {
            return Err(Error::InvalidArgument("MINRES tolerances must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    /// Preconditioned residual norm `√(rᵀN⁻¹r)` before each iteration and
    /// after the last one.
    pub residuals: Vec<f64>,
    pub converged: bool,
    pub elapsed: Duration,
}

enum BlockSolver<'a> {
    Sparse(Factorization),
    Dense(&'a crate::fractional::MultiplierNorm),
}

/// Exact block-diagonal `N⁻¹`.
pub struct BlockPreconditioner<'a> {
    offsets: Vec<usize>,
    solvers: Vec<BlockSolver<'a>>,
}

impl<'a> BlockPreconditioner<'a> {
    pub fn new(system: &'a BlockSystem) -> Result<Self> {
        let solvers = system
            .norms
            .iter()
            .map(|n| match n {
                NormBlock::Sparse(m) => factorize(m, FactorKind::Spd).map(BlockSolver::Sparse),
                NormBlock::Multiplier(m) => Ok(BlockSolver::Dense(m)),
            })
            .collect::<Result<_>>()?;
        Ok(BlockPreconditioner {
            offsets: system.offsets(),
            solvers,
        })
    }

    pub fn dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// `z = N⁻¹ r`.
    pub fn apply(&self, r: &[f64], z: &mut [f64]) {
        for (i, s) in self.solvers.iter().enumerate() {
            let (a, b) = (self.offsets[i], self.offsets[i + 1]);
            match s {
                BlockSolver::Sparse(f) => f.solve_into(&r[a..b], &mut z[a..b]),
                BlockSolver::Dense(m) => z[a..b].copy_from_slice(&m.solve(&r[a..b])),
            }
        }
    }
}

/// Preconditioned MINRES from a seeded random initial vector, with `N` the
/// block norm matrix of `system`.
pub fn minres(system: &BlockSystem, config: &MinresConfig) -> Result<(Vec<f64>, SolveReport)> {
    config.validate()?;
    let start = Instant::now();
    let prec = BlockPreconditioner::new(system)?;
    let n = system.dim();
    let b = &system.rhs;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();

    let mut r1 = vec![0.0; n];
    system.apply(&x, &mut r1);
    for (r, bi) in r1.iter_mut().zip(b) {
        *r = bi - *r;
    }
    let mut y = vec![0.0; n];
    prec.apply(&r1, &mut y);
    let beta1 = dot(&r1, &y);
    if beta1 < 0.0 {
        return Err(Error::Breakdown("preconditioner is not positive definite".into()));
    }
    let beta1 = beta1.sqrt();
    let mut residuals = vec![beta1];
    let done = |phi: f64| phi <= config.rtol * beta1 || phi <= config.atol;
    if done(beta1) {
        return Ok((x, report(0, residuals, true, start)));
    }

    let mut r2 = r1.clone();
    let (mut oldb, mut beta) = (0.0, beta1);
    let (mut dbar, mut epsln, mut phibar) = (0.0, 0.0, beta1);
    let (mut cs, mut sn) = (-1.0, 0.0);
    let mut w = vec![0.0; n];
    let mut w1 = vec![0.0; n];
    let mut w2 = vec![0.0; n];
    let mut v = vec![0.0; n];

    for k in 1..=config.max_iterations {
        let s = 1.0 / beta;
        for (vi, yi) in v.iter_mut().zip(&y) {
            *vi = s * yi;
        }
        system.apply(&v, &mut y);
        if k >= 2 {
            let c = beta / oldb;
            for (yi, ri) in y.iter_mut().zip(&r1) {
                *yi -= c * ri;
            }
        }
        let alfa = dot(&v, &y);
        let c = alfa / beta;
        for (yi, ri) in y.iter_mut().zip(&r2) {
            *yi -= c * ri;
        }
        std::mem::swap(&mut r1, &mut r2);
        r2.copy_from_slice(&y);
        prec.apply(&r2, &mut y);
        oldb = beta;
        let bb = dot(&r2, &y);
        if bb < 0.0 {
            return Err(Error::Breakdown("preconditioner is not positive definite".into()));
        }
        beta = bb.sqrt();

        let oldeps = epsln;
        let delta = cs * dbar + sn * alfa;
        let gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        let gamma = gbar.hypot(beta);
        if gamma == 0.0 {
            return Err(Error::Breakdown(format!("zero search direction at iteration {k}")));
        }
        cs = gbar / gamma;
        sn = beta / gamma;
        let phi = cs * phibar;
        phibar *= sn;

        std::mem::swap(&mut w1, &mut w2);
        std::mem::swap(&mut w2, &mut w);
        let denom = 1.0 / gamma;
        for i in 0..n {
            w[i] = (v[i] - oldeps * w1[i] - delta * w2[i]) * denom;
            x[i] += phi * w[i];
        }
        residuals.push(phibar);
        if done(phibar) || beta == 0.0 {
            return Ok((x, report(k, residuals, true, start)));
        }
    }
    Ok((x, report(config.max_iterations, residuals, false, start)))
}

fn report(iterations: usize, residuals: Vec<f64>, converged: bool, start: Instant) -> SolveReport {
    SolveReport {
        iterations,
        residuals,
        converged,
        elapsed: start.elapsed(),
    }
}
