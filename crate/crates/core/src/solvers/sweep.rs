use crate::error::Result;
use crate::experiment::{run_config, ExperimentConfig, Mode, RunRecord};
use crate::problems::{DsPrecond, ParameterSet, PrecondVariant, ProblemKind};

use super::MinresConfig;

/// MINRES iteration counts of the Darcy–Stokes system for every
/// `(level, μ, K, α)` combination, in that order.
pub fn iteration_sweep(
    grid: &[ParameterSet],
    levels: &[u32],
    precond: DsPrecond,
    config: &MinresConfig,
) -> Result<Vec<RunRecord>> {
    let mut cfg = ExperimentConfig::new(ProblemKind::DarcyStokes);
    cfg.levels = levels.to_vec();
    cfg.preconds = vec![PrecondVariant::Ds(precond)];
    cfg.parameters = grid.to_vec();
    cfg.mode = Mode::Iterations;
    cfg.minres = *config;
    run_config(&cfg)
}
