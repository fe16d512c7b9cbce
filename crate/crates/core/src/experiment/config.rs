//! INI-style experiment configuration.
//!
//! ```text
//! [experiment]
//! preset = table1          ; optional, other keys override it
//! problem = l2-trace
//! levels = 2..5
//! precond = identity-mass, hinv-mass
//! ```
//!
//! Lists are comma separated; every list key is expanded as a Cartesian
//! product. Section headers only group keys.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::problems::{BabuskaBc, DsPrecond, L2Bc, Pairing, ParameterSet, PrecondVariant, ProblemKind, SchurNorm};
use crate::solvers::{MinresConfig, DEFAULT_DENSE_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Iterations,
    Condition,
    Both,
}

impl Mode {
    pub fn iterations(self) -> bool {
        matches!(self, Mode::Iterations | Mode::Both)
    }

    pub fn condition(self) -> bool {
        matches!(self, Mode::Condition | Mode::Both)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EigMethod {
    Dense,
    Iterative,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MeshFamily {
    /// Crossed unit-square meshes with `2^level` squares per side.
    Structured,
    /// Parent mesh file refined `level − 1` times.
    File(PathBuf),
}

impl MeshFamily {
    pub fn name(&self) -> String {
        match self {
            MeshFamily::Structured => "us".into(),
            MeshFamily::File(p) => p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub mesh: MeshFamily,
    pub levels: Vec<u32>,
    pub pairings: Vec<Pairing>,
    /// Boundary-condition variant names, validated against the problem.
    pub bcs: Vec<String>,
    pub preconds: Vec<PrecondVariant>,
    /// Darcy–Stokes parameter grid in `(μ, K, α)` order; empty otherwise.
    pub parameters: Vec<ParameterSet>,
    pub mode: Mode,
    pub method: EigMethod,
    pub dense_cap: usize,
    pub minres: MinresConfig,
    /// Fill the `seconds` column. Off by default so reruns are byte-identical.
    pub timing: bool,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Defaults for `problem`.
    pub fn new(problem: ProblemKind) -> Self {
        let (bcs, preconds, parameters) = match problem {
            ProblemKind::L2Trace => (
                vec![L2Bc::None.name().to_string()],
                vec![PrecondVariant::Schur(SchurNorm::HinvMass)],
                vec![],
            ),
            ProblemKind::Babuska => (
                vec![BabuskaBc::NeumannIntersect.name().to_string()],
                vec![PrecondVariant::Schur(SchurNorm::HinvMass)],
                vec![],
            ),
            ProblemKind::DarcyStokes => (
                vec!["mixed".to_string()],
                vec![PrecondVariant::Ds(DsPrecond::Robust)],
                vec![ParameterSet { mu: 1.0, k: 1.0, alpha: 1.0 }],
            ),
        };
        ExperimentConfig {
            problem,
            mesh: MeshFamily::Structured,
            levels: vec![2, 3, 4],
            pairings: vec![Pairing::P2P1],
            bcs,
            preconds,
            parameters,
            mode: Mode::Condition,
            method: EigMethod::Dense,
            dense_cap: DEFAULT_DENSE_CAP,
            minres: MinresConfig::default(),
            timing: false,
            output: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.levels.is_empty() {
            return bad("`levels` is empty".into());
        }
        if let Some(l) = self.levels.iter().find(|&&l| l == 0 || l > 12) {
            return bad(format!("level {l} outside 1..=12"));
        }
        if self.pairings.is_empty() || self.bcs.is_empty() || self.preconds.is_empty() {
            return bad("`pairing`, `bc` and `precond` need at least one value".into());
        }
        for bc in &self.bcs {
            let ok = match self.problem {
                ProblemKind::L2Trace => bc.parse::<L2Bc>().is_ok(),
                ProblemKind::Babuska => bc.parse::<BabuskaBc>().is_ok(),
                ProblemKind::DarcyStokes => bc == "mixed",
            };
            if !ok {
                return bad(format!("bc `{bc}` does not apply to {}", self.problem.name()));
            }
        }
        for p in &self.preconds {
            let ok = matches!(
                (self.problem, p),
                (ProblemKind::DarcyStokes, PrecondVariant::Ds(_))
                    | (ProblemKind::L2Trace | ProblemKind::Babuska, PrecondVariant::Schur(_))
            );
            if !ok {
                return bad(format!("preconditioner `{}` does not apply to {}", p.name(), self.problem.name()));
            }
        }
        match self.problem {
            ProblemKind::DarcyStokes => {
                if self.parameters.is_empty() {
                    return bad("Darcy–Stokes runs need a parameter grid".into());
                }
                for p in &self.parameters {
                    p.validate().map_err(|e| Error::Config(e.to_string()))?;
                }
                if self.mesh != MeshFamily::Structured {
                    return bad("Darcy–Stokes runs use the structured family only".into());
                }
            }
            _ => {
                if !self.parameters.is_empty() {
                    return bad(format!("`mu`, `K`, `alpha` do not apply to {}", self.problem.name()));
                }
            }
        }
        if !(self.minres.rtol > 0.0 && self.minres.atol > 0.0) || self.minres.max_iterations == 0 {
            return bad("MINRES tolerances and iteration cap must be positive".into());
        }
        Ok(())
    }
}

/// What a config file asks for.
#[derive(Clone, Debug, PartialEq)]
pub enum Job {
    Runs(ExperimentConfig),
    Envelope { cases: Vec<String>, output: Option<PathBuf> },
}

pub const PRESETS: [&str; 7] = [
    "table1",
    "table2",
    "table3",
    "table4",
    "ds-naive-sweep",
    "ds-robust-sweep",
    "envelope-all",
];

pub const ENVELOPE_CASES: [&str; 4] = ["halfplane", "disk", "square-corner", "fe-scaling"];

/// Body of a built-in preset, in config syntax.
pub fn preset_text(name: &str) -> Result<&'static str> {
    Ok(match name {
        "table1" => "problem = l2-trace\nlevels = 2..8\npairing = P2-P1\nbc = none\nprecond = identity-mass, fractional(-0.5), hinv-mass\nmode = condition\n",
        "table2" => "problem = l2-trace\nlevels = 1..7\npairing = P2-P1, P2-P0\nbc = none\nprecond = hinv-mass\nmode = condition\n",
        "table3" => "problem = babuska\nlevels = 2..8\npairing = P2-P1\nbc = neumann-intersect\nprecond = fractional(0.5), identity-mass, hinv-mass\nmode = condition\n",
        "table4" => "problem = babuska\nlevels = 1..7\npairing = P2-P1, P2-P0\nbc = neumann-intersect, dirichlet-intersect\nprecond = hinv-mass\nmode = condition\n",
        "ds-naive-sweep" => "problem = darcy-stokes\nlevels = 2..5\nprecond = naive-ds\nmu = 1, 1e-4, 1e-8\nK = 1, 1e-4, 1e-8\nalpha = 1\nmode = both\n",
        "ds-robust-sweep" => "problem = darcy-stokes\nlevels = 2..5\nprecond = robust-ds\nmu = 1, 1e-4, 1e-8\nK = 1, 1e-4, 1e-8\nalpha = 1\nmode = both\n",
        "envelope-all" => "problem = envelope\ncases = halfplane, disk, square-corner, fe-scaling\n",
        _ => return Err(Error::Config(format!("unknown preset `{name}` (known: {})", PRESETS.join(", ")))),
    })
}

/// `key = value` pairs in file order, with line numbers.
fn parse_pairs(text: &str) -> Result<Vec<(usize, String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split(['#', ';']).next().unwrap_or("").trim();
        if line.is_empty() || (line.starts_with('[') && line.ends_with(']')) {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", i + 1)))?;
        out.push((i + 1, k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn list(v: &str) -> Vec<String> {
    v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

/// Splits on commas outside parentheses, so `fractional(-1/2)` stays whole.
fn precond_list(v: &str) -> Vec<String> {
    let mut out = Vec::new();
    let (mut depth, mut cur) = (0i32, String::new());
    for c in v.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(std::mem::take(&mut cur).trim().to_string());
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    out.push(cur.trim().to_string());
    out.retain(|s| !s.is_empty());
    out
}

fn parse_levels(v: &str) -> Result<Vec<u32>> {
    let mut out = Vec::new();
    for item in list(v) {
        if let Some((a, b)) = item.split_once("..") {
            let a: u32 = a.trim().parse().map_err(|_| Error::Config(format!("bad level range `{item}`")))?;
            let b: u32 = b.trim().parse().map_err(|_| Error::Config(format!("bad level range `{item}`")))?;
            if a > b {
                return Err(Error::Config(format!("empty level range `{item}`")));
            }
            out.extend(a..=b);
        } else {
            out.push(item.parse().map_err(|_| Error::Config(format!("bad level `{item}`")))?);
        }
    }
    Ok(out)
}

fn parse_floats(key: &str, v: &str) -> Result<Vec<f64>> {
    list(v)
        .iter()
        .map(|s| s.parse::<f64>().map_err(|_| Error::Config(format!("`{key}`: bad number `{s}`"))))
        .collect()
}

fn parse_scalar<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Config(format!("`{key}`: bad value `{v}`")))
}

/// Parses a config; relative mesh and output paths resolve against `base`.
pub fn parse_config(text: &str, base: &Path) -> Result<Job> {
    let mut pairs = parse_pairs(text)?;
    if let Some(pos) = pairs.iter().position(|(_, k, _)| k == "preset") {
        let (_, _, name) = pairs.remove(pos);
        let mut merged = parse_pairs(preset_text(&name)?)?;
        merged.extend(pairs);
        pairs = merged;
    }
    let get = |key: &str| pairs.iter().rev().find(|(_, k, _)| k == key).map(|(_, _, v)| v.as_str());
    let output = get("output").map(|p| base.join(p));

    let problem = get("problem").ok_or_else(|| Error::Config("missing `problem`".into()))?;
    if problem == "envelope" {
        for (line, k, _) in &pairs {
            if !matches!(k.as_str(), "problem" | "cases" | "output") {
                return Err(Error::Config(format!("line {line}: unknown key `{k}` for envelope runs")));
            }
        }
        let cases = get("cases").map(list).unwrap_or_else(|| ENVELOPE_CASES.iter().map(|s| s.to_string()).collect());
        for c in &cases {
            if !ENVELOPE_CASES.contains(&c.as_str()) {
                return Err(Error::Config(format!("unknown envelope case `{c}`")));
            }
        }
        return Ok(Job::Envelope { cases, output });
    }

    let kind: ProblemKind = problem.parse().map_err(|e: Error| Error::Config(e.to_string()))?;
    let mut cfg = ExperimentConfig::new(kind);
    cfg.output = output;
    let (mut mu, mut k, mut alpha) = (None, None, None);
    for (line, key, v) in &pairs {
        let v = v.as_str();
        match key.as_str() {
            "problem" | "output" => {}
            "mesh" => {
                cfg.mesh = match v {
                    "us" | "structured" => MeshFamily::Structured,
                    path => MeshFamily::File(base.join(path)),
                }
            }
            "levels" => cfg.levels = parse_levels(v)?,
            "pairing" => {
                cfg.pairings = list(v)
                    .iter()
                    .map(|s| s.parse().map_err(|e: Error| Error::Config(e.to_string())))
                    .collect::<Result<_>>()?
            }
            "bc" => cfg.bcs = list(v),
            "precond" => {
                cfg.preconds = precond_list(v)
                    .iter()
                    .map(|s| s.parse().map_err(|e: Error| Error::Config(e.to_string())))
                    .collect::<Result<_>>()?
            }
            "mu" => mu = Some(parse_floats(key, v)?),
            "K" | "k" => k = Some(parse_floats(key, v)?),
            "alpha" => alpha = Some(parse_floats(key, v)?),
            "mode" => {
                cfg.mode = match v {
                    "iterations" => Mode::Iterations,
                    "condition" => Mode::Condition,
                    "both" => Mode::Both,
                    _ => return Err(Error::Config(format!("line {line}: bad mode `{v}`"))),
                }
            }
            "method" => {
                cfg.method = match v {
                    "dense" => EigMethod::Dense,
                    "iterative" => EigMethod::Iterative,
                    _ => return Err(Error::Config(format!("line {line}: bad method `{v}`"))),
                }
            }
            "dense_cap" => cfg.dense_cap = parse_scalar(key, v)?,
            "seed" => cfg.minres.rng_seed = parse_scalar(key, v)?,
            "rtol" => cfg.minres.rtol = parse_scalar(key, v)?,
            "atol" => cfg.minres.atol = parse_scalar(key, v)?,
            "max_iterations" => cfg.minres.max_iterations = parse_scalar(key, v)?,
            "timing" => cfg.timing = parse_scalar(key, v)?,
            _ => return Err(Error::Config(format!("line {line}: unknown key `{key}`"))),
        }
    }
    if mu.is_some() || k.is_some() || alpha.is_some() {
        if kind != ProblemKind::DarcyStokes {
            return Err(Error::Config(format!("`mu`, `K`, `alpha` do not apply to {}", kind.name())));
        }
        let (mu, k, alpha) = (mu.unwrap_or(vec![1.0]), k.unwrap_or(vec![1.0]), alpha.unwrap_or(vec![1.0]));
        cfg.parameters.clear();
        for &m in &mu {
            for &kk in &k {
                for &a in &alpha {
                    cfg.parameters.push(ParameterSet { mu: m, k: kk, alpha: a });
                }
            }
        }
    }
    cfg.validate()?;
    Ok(Job::Runs(cfg))
}

/// Reads and parses a config file.
pub fn load_config(path: &Path) -> Result<Job> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text, path.parent().unwrap_or(Path::new(".")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn runs(text: &str) -> ExperimentConfig {
        match parse_config(text, Path::new("/base")).unwrap() {
            Job::Runs(c) => c,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn preset_with_override() {
        let c = runs("[experiment]\npreset = table1\nlevels = 2, 3 ; two levels\n");
        assert_eq!(c.problem, ProblemKind::L2Trace);
        assert_eq!(c.levels, vec![2, 3]);
        assert_eq!(c.preconds.len(), 3);
        assert_eq!(c.preconds[1], PrecondVariant::Schur(SchurNorm::Fractional(-0.5)));
    }

    #[test]
    fn all_presets_parse() {
        for p in PRESETS {
            parse_config(&format!("preset = {p}\n"), Path::new(".")).unwrap();
        }
    }

    #[test]
    fn grid_is_cartesian_in_mu_k_alpha_order() {
        let c = runs("problem = darcy-stokes\nmu = 1, 2\nK = 3, 4\nalpha = 0.5\nprecond = naive-ds\n");
        let got: Vec<(f64, f64)> = c.parameters.iter().map(|p| (p.mu, p.k)).collect();
        assert_eq!(got, vec![(1.0, 3.0), (1.0, 4.0), (2.0, 3.0), (2.0, 4.0)]);
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            "problem = l2-trace\nfoo = 1\n",
            "problem = l2-trace\nlevels = \n",
            "problem = l2-trace\nbc = neumann-intersect\n",
            "problem = babuska\nprecond = robust-ds\n",
            "problem = darcy-stokes\nmu = 0\n",
            "problem = l2-trace\nmu = 1\n",
            "problem = l2-trace\nmode = fast\n",
            "preset = table9\n",
            "problem = envelope\ncases = moon\n",
            "levels 2\n",
        ] {
            assert!(parse_config(text, Path::new(".")).is_err(), "{text}");
        }
    }

    #[test]
    fn file_mesh_resolves_against_base() {
        let c = runs("problem = l2-trace\nmesh = uu.mesh\n");
        assert_eq!(c.mesh, MeshFamily::File(PathBuf::from("/base/uu.mesh")));
        assert_eq!(c.mesh.name(), "uu");
    }
}
