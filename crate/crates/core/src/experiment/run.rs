use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use super::config::{EigMethod, ExperimentConfig, MeshFamily};
use super::record::RunRecord;
use crate::error::{Error, Result};
use crate::linalg::LanczosOptions;
use crate::mesh::{generate_crossed, read_mesh, Mesh2D, Rect};
use crate::problems::{
    build_babuska, build_darcy_stokes, build_l2_trace, BlockSystem, Pairing, ParameterSet, PrecondVariant,
    ProblemKind,
};
use crate::solvers::{condition_number, minres, SpectrumMethod};

/// One row of the run grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Case {
    pub level: u32,
    pub parameters: Option<ParameterSet>,
    pub pairing: Pairing,
    pub bc: String,
    pub precond: PrecondVariant,
}

/// Rows in output order: level, then `(μ, K, α)`, then pairing, bc and
/// preconditioner.
pub fn expand_cases(cfg: &ExperimentConfig) -> Vec<Case> {
    let params: Vec<Option<ParameterSet>> = if cfg.problem == ProblemKind::DarcyStokes {
        cfg.parameters.iter().copied().map(Some).collect()
    } else {
        vec![None]
    };
    let pairings: &[Pairing] = if cfg.problem == ProblemKind::DarcyStokes { &[Pairing::P2P1] } else { &cfg.pairings };
    let mut out = Vec::new();
    for &level in &cfg.levels {
        for &parameters in &params {
            for &pairing in pairings {
                for bc in &cfg.bcs {
                    for &precond in &cfg.preconds {
                        out.push(Case { level, parameters, pairing, bc: bc.clone(), precond });
                    }
                }
            }
        }
    }
    out
}

/// Unit-square mesh of the family at `level`.
pub fn family_mesh(family: &MeshFamily, level: u32) -> Result<Mesh2D> {
    match family {
        MeshFamily::Structured => {
            let n = 1usize << level;
            generate_crossed(n, n, Rect::UNIT)
        }
        MeshFamily::File(path) => {
            let mut mesh = read_mesh(path)?;
            for _ in 1..level {
                mesh = mesh.refine_uniform();
            }
            Ok(mesh)
        }
    }
}

/// Assembles the system of one case and its mesh size.
pub fn build_case(cfg: &ExperimentConfig, case: &Case) -> Result<(BlockSystem, f64)> {
    let schur = |p: PrecondVariant| match p {
        PrecondVariant::Schur(s) => Ok(s),
        PrecondVariant::Ds(_) => Err(Error::Config(format!("`{}` needs the Darcy–Stokes problem", p.name()))),
    };
    match cfg.problem {
        ProblemKind::L2Trace | ProblemKind::Babuska => {
            let mesh = family_mesh(&cfg.mesh, case.level)?;
            let h = match cfg.mesh {
                MeshFamily::Structured => 0.5f64.powi(case.level as i32),
                MeshFamily::File(_) => mesh.max_edge_length(),
            };
            let s = schur(case.precond)?;
            let sys = if cfg.problem == ProblemKind::L2Trace {
                build_l2_trace(&mesh, case.pairing, case.bc.parse()?, s)?
            } else {
                build_babuska(&mesh, case.pairing, case.bc.parse()?, s)?
            };
            Ok((sys, h))
        }
        ProblemKind::DarcyStokes => {
            let PrecondVariant::Ds(p) = case.precond else {
                return Err(Error::Config(format!("`{}` does not apply to darcy-stokes", case.precond.name())));
            };
            let params = case.parameters.ok_or_else(|| Error::Config("missing parameters".into()))?;
            Ok((build_darcy_stokes(params, case.level, p)?, 0.5f64.powi(case.level as i32)))
        }
    }
}

/// Computes one row.
pub fn run_case(cfg: &ExperimentConfig, case: &Case) -> Result<RunRecord> {
    let start = Instant::now();
    let (sys, h) = build_case(cfg, case)?;
    let mut rec = RunRecord {
        problem: cfg.problem.name().into(),
        mesh_family: cfg.mesh.name(),
        level: case.level,
        h,
        pairing: sys.meta.pairing.clone(),
        bc: sys.meta.bc.clone(),
        precond: sys.meta.precond.clone(),
        mu: case.parameters.map(|p| p.mu),
        k: case.parameters.map(|p| p.k),
        alpha: case.parameters.map(|p| p.alpha),
        dofs: sys.dofs(),
        iterations: None,
        converged: None,
        cond: None,
        lambda_min_abs: None,
        lambda_max_abs: None,
        seed: cfg.minres.rng_seed,
        seconds: None,
        flag: String::new(),
    };
    let mut flags = Vec::new();
    if cfg.mode.iterations() {
        let (_, report) = minres(&sys, &cfg.minres)?;
        rec.iterations = Some(report.iterations);
        rec.converged = Some(report.converged);
    }
    if cfg.mode.condition() {
        let method = match cfg.method {
            EigMethod::Dense => SpectrumMethod::Dense { cap: cfg.dense_cap },
            EigMethod::Iterative => SpectrumMethod::Iterative(LanczosOptions {
                seed: cfg.minres.rng_seed,
                ..LanczosOptions::default()
            }),
        };
        match condition_number(&sys, method) {
            Ok(s) => {
                rec.cond = Some(s.condition);
                rec.lambda_min_abs = Some(s.lambda_min_abs);
                rec.lambda_max_abs = Some(s.lambda_max_abs);
                if !s.converged {
                    flags.push("lanczos-not-converged");
                }
            }
            Err(Error::DenseCapExceeded { .. }) => flags.push("dense-cap-exceeded"),
            Err(e) => return Err(e),
        }
    }
    rec.flag = flags.join(";");
    if cfg.timing {
        rec.seconds = Some(start.elapsed().as_secs_f64());
    }
    Ok(rec)
}

/// Worker count: `FRACPREC_THREADS` if set and positive, else the number of
/// available cores.
pub fn worker_count() -> usize {
    std::env::var("FRACPREC_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs every case of `cfg` on [`worker_count`] threads; rows come back in
/// [`expand_cases`] order.
pub fn run_config(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    run_config_with(cfg, worker_count())
}

/// [`run_config`] on an explicit number of threads.
pub fn run_config_with(cfg: &ExperimentConfig, workers: usize) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    let cases = expand_cases(cfg);
    if cfg.mode.condition() && cfg.method == EigMethod::Dense {
        let smallest = cfg.levels.iter().min().copied().unwrap_or(1);
        if let Some(first) = cases.iter().find(|c| c.level == smallest) {
            let (sys, _) = build_case(cfg, first)?;
            if sys.dim() > cfg.dense_cap {
                return Err(Error::Config(format!(
                    "dense cap {} is below the {} dofs of the smallest level",
                    cfg.dense_cap,
                    sys.dim()
                )));
            }
        }
    }
    let workers = workers.min(cases.len()).max(1);
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<RunRecord>>>> = Mutex::new((0..cases.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= cases.len() {
                    break;
                }
                let r = run_case(cfg, &cases[i]);
                results.lock().unwrap()[i] = Some(r);
            });
        }
    });
    results.into_inner().unwrap().into_iter().map(|r| r.expect("every case ran")).collect()
}
