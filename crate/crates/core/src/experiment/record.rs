use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// One row of an experiment CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub problem: String,
    pub mesh_family: String,
    pub level: u32,
    pub h: f64,
    pub pairing: String,
    pub bc: String,
    pub precond: String,
    pub mu: Option<f64>,
    pub k: Option<f64>,
    pub alpha: Option<f64>,
    pub dofs: Vec<usize>,
    pub iterations: Option<usize>,
    pub converged: Option<bool>,
    pub cond: Option<f64>,
    pub lambda_min_abs: Option<f64>,
    pub lambda_max_abs: Option<f64>,
    pub seed: u64,
    pub seconds: Option<f64>,
    /// Empty, or a note such as `dense-cap-exceeded`.
    pub flag: String,
}

pub const COLUMNS: [&str; 19] = [
    "problem",
    "mesh_family",
    "level",
    "h",
    "pairing",
    "bc",
    "precond",
    "mu",
    "K",
    "alpha",
    "dofs",
    "iterations",
    "converged",
    "cond",
    "lambda_min_abs",
    "lambda_max_abs",
    "seed",
    "seconds",
    "flag",
];

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(String::new, T::to_string)
}

impl RunRecord {
    fn fields(&self) -> Vec<String> {
        vec![
            self.problem.clone(),
            self.mesh_family.clone(),
            self.level.to_string(),
            self.h.to_string(),
            self.pairing.clone(),
            self.bc.clone(),
            self.precond.clone(),
            opt(&self.mu),
            opt(&self.k),
            opt(&self.alpha),
            self.dofs.iter().map(usize::to_string).collect::<Vec<_>>().join(";"),
            opt(&self.iterations),
            opt(&self.converged),
            opt(&self.cond),
            opt(&self.lambda_min_abs),
            opt(&self.lambda_max_abs),
            self.seed.to_string(),
            opt(&self.seconds),
            self.flag.clone(),
        ]
    }
}

/// Writes the header and rows with LF line endings. Floats use Rust's
/// shortest round-trip formatting.
pub fn write_records(out: impl Write, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(COLUMNS)?;
    for r in records {
        w.write_record(r.fields())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_records_file(path: &Path, records: &[RunRecord]) -> Result<()> {
    let mut buf = Vec::new();
    write_records(&mut buf, records)?;
    std::fs::write(path, buf)?;
    Ok(())
}

fn parse_opt<T: std::str::FromStr>(s: &str, col: &str, line: usize) -> Result<Option<T>> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse()
        .map(Some)
        .map_err(|_| Error::InvalidArgument(format!("row {line}: bad `{col}` value `{s}`")))
}

fn parse_req<T: std::str::FromStr>(s: &str, col: &str, line: usize) -> Result<T> {
    parse_opt(s, col, line)?.ok_or_else(|| Error::InvalidArgument(format!("row {line}: empty `{col}`")))
}

/// Reads a CSV written by [`write_records`].
pub fn read_records(input: impl Read) -> Result<Vec<RunRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    let missing: Vec<&str> = COLUMNS.iter().copied().filter(|c| !header.iter().any(|h| h == *c)).collect();
    if !missing.is_empty() {
        return Err(Error::InvalidArgument(format!("missing columns: {}", missing.join(", "))));
    }
    let idx = |c: &str| header.iter().position(|h| h == c).unwrap();
    let mut out = Vec::new();
    for (i, row) in r.records().enumerate() {
        let row = row?;
        let line = i + 2;
        let f = |c: &str| row.get(idx(c)).unwrap_or("");
        out.push(RunRecord {
            problem: f("problem").into(),
            mesh_family: f("mesh_family").into(),
            level: parse_req(f("level"), "level", line)?,
            h: parse_req(f("h"), "h", line)?,
            pairing: f("pairing").into(),
            bc: f("bc").into(),
            precond: f("precond").into(),
            mu: parse_opt(f("mu"), "mu", line)?,
            k: parse_opt(f("K"), "K", line)?,
            alpha: parse_opt(f("alpha"), "alpha", line)?,
            dofs: f("dofs")
                .split(';')
                .filter(|s| !s.is_empty())
                .map(|s| parse_req(s, "dofs", line))
                .collect::<Result<_>>()?,
            iterations: parse_opt(f("iterations"), "iterations", line)?,
            converged: parse_opt(f("converged"), "converged", line)?,
            cond: parse_opt(f("cond"), "cond", line)?,
            lambda_min_abs: parse_opt(f("lambda_min_abs"), "lambda_min_abs", line)?,
            lambda_max_abs: parse_opt(f("lambda_max_abs"), "lambda_max_abs", line)?,
            seed: parse_req(f("seed"), "seed", line)?,
            seconds: parse_opt(f("seconds"), "seconds", line)?,
            flag: f("flag").into(),
        });
    }
    Ok(out)
}
