use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use fracprec::experiment::{
    envelope_verify, load_config, read_records, render_heatmap, run_config, write_records, write_verify_rows,
    HeatmapValue, Job,
};
use fracprec::mesh::{generate_crossed, read_mesh, write_mesh, Rect};

#[derive(Parser)]
#[command(name = "fracprec", version, about = "Preconditioned interface saddle-point experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config (or preset) and write the CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's `output`; stdout when neither is set.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a small-multiples SVG from a run CSV.
    Heatmap {
        #[arg(long)]
        csv: PathBuf,
        /// cond | iterations
        #[arg(long)]
        value: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exactness and convergence data for the envelope operators.
    EnvelopeVerify {
        /// halfplane | disk | square-corner | fe-scaling | all
        #[arg(long)]
        case: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate or inspect mesh files.
    #[command(subcommand)]
    Mesh(MeshCommand),
}

#[derive(Subcommand)]
enum MeshCommand {
    /// Write a crossed structured mesh.
    Gen(GenArgs),
    /// Print counts, mesh size, regions and boundary tags.
    Info { path: PathBuf },
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 4)]
    nx: usize,
    #[arg(long, default_value_t = 4)]
    ny: usize,
    /// x0,x1,y0,y1
    #[arg(long, default_value = "0,1,0,1")]
    bounds: String,
    #[arg(long)]
    out: PathBuf,
}

fn emit(out: Option<&Path>, bytes: &[u8], stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => stdout.write_all(bytes).context("writing stdout"),
    }
}

fn run(config: &Path, out: Option<PathBuf>, stdout: &mut dyn Write) -> Result<()> {
    let job = load_config(config).with_context(|| format!("loading {}", config.display()))?;
    let mut buf = Vec::new();
    let target = match job {
        Job::Runs(cfg) => {
            let records = run_config(&cfg)?;
            write_records(&mut buf, &records)?;
            out.or(cfg.output)
        }
        Job::Envelope { cases, output } => {
            let mut rows = Vec::new();
            for c in &cases {
                rows.extend(envelope_verify(c)?);
            }
            write_verify_rows(&mut buf, &rows)?;
            out.or(output)
        }
    };
    emit(target.as_deref(), &buf, stdout)
}

fn heatmap(csv: &Path, value: &str, out: &Path) -> Result<()> {
    let value: HeatmapValue = value.parse()?;
    let file = std::fs::File::open(csv).with_context(|| format!("opening {}", csv.display()))?;
    let records = read_records(file).with_context(|| format!("reading {}", csv.display()))?;
    if records.is_empty() {
        bail!("{}: no rows to plot", csv.display());
    }
    let svg = render_heatmap(&records, value)?;
    std::fs::write(out, svg).with_context(|| format!("writing {}", out.display()))
}

fn mesh(cmd: MeshCommand, stdout: &mut dyn Write) -> Result<()> {
    match cmd {
        MeshCommand::Gen(a) => {
            let b: Vec<f64> = a
                .bounds
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .context("--bounds expects four numbers x0,x1,y0,y1")?;
            if b.len() != 4 {
                bail!("--bounds expects four numbers x0,x1,y0,y1");
            }
            let mesh = generate_crossed(a.nx, a.ny, Rect::new(b[0], b[1], b[2], b[3]))?;
            write_mesh(&mesh, &a.out)?;
            Ok(())
        }
        MeshCommand::Info { path } => {
            let mesh = read_mesh(&path)?;
            let mut tags: Vec<&str> = mesh.facet_tags().values().map(String::as_str).collect();
            tags.sort_unstable();
            tags.dedup();
            let mut regions: Vec<&str> = mesh.regions().iter().flatten().map(String::as_str).collect();
            regions.sort_unstable();
            regions.dedup();
            let info = format!(
                "vertices {}\ncells {}\nedges {}\nh {}\narea {}\nregions {}\ntags {}\n",
                mesh.num_vertices(),
                mesh.num_cells(),
                mesh.num_edges(),
                mesh.max_edge_length(),
                mesh.total_area(),
                regions.join(","),
                tags.join(","),
            );
            emit(None, info.as_bytes(), stdout)
        }
    }
}

fn dispatch(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Run { config, out } => run(&config, out, stdout),
        Command::Heatmap { csv, value, out } => heatmap(&csv, &value, &out),
        Command::EnvelopeVerify { case, out } => {
            let rows = envelope_verify(&case)?;
            let mut buf = Vec::new();
            write_verify_rows(&mut buf, &rows)?;
            emit(out.as_deref(), &buf, stdout)
        }
        Command::Mesh(cmd) => mesh(cmd, stdout),
    }
}

fn main() -> Result<()> {
    dispatch(Cli::parse(), &mut std::io::stdout().lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Runs the CLI with `args`, relative paths taken inside `dir`.
    fn fracprec(args: &[&str], dir: &Path) -> (Result<()>, String) {
        let args = args.iter().map(|a| {
            let p = dir.join(a);
            if a.ends_with(".ini") || a.ends_with(".csv") || a.ends_with(".svg") || a.ends_with(".mesh") {
                p.display().to_string()
            } else {
                a.to_string()
            }
        });
        let cli = Cli::try_parse_from(std::iter::once("fracprec".to_string()).chain(args)).unwrap();
        let mut out = Vec::new();
        let res = dispatch(cli, &mut out);
        (res, String::from_utf8(out).unwrap())
    }

    fn err_text(r: Result<()>) -> String {
        format!("{:#}", r.unwrap_err())
    }

    #[test]
    fn run_then_heatmap() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("ds.ini"),
            "[grid]\nproblem = darcy-stokes\nlevels = 1, 2\nprecond = robust-ds\nmu = 1, 1e-4, 1e-8\nK = 1, 1e-4, 1e-8\nmode = iterations\noutput = ds.csv\n",
        )
        .unwrap();
        fracprec(&["run", "--config", "ds.ini"], dir.path()).0.unwrap();
        let csv = std::fs::read_to_string(dir.path().join("ds.csv")).unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "problem,mesh_family,level,h,pairing,bc,precond,mu,K,alpha,dofs,iterations,converged,cond,lambda_min_abs,lambda_max_abs,seed,seconds,flag"
        );
        assert_eq!(lines.count(), 18);
        assert!(!csv.contains('\r'));

        fracprec(&["heatmap", "--csv", "ds.csv", "--value", "iterations", "--out", "ds.svg"], dir.path()).0.unwrap();
        let svg = std::fs::read_to_string(dir.path().join("ds.svg")).unwrap();
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches(r#"class="panel""#).count(), 9);

        let (r, _) = fracprec(&["heatmap", "--csv", "ds.csv", "--value", "speed", "--out", "x.svg"], dir.path());
        assert!(r.is_err());
    }

    #[test]
    fn heatmap_errors_name_the_file() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("empty.csv"), "").unwrap();
        let err = err_text(fracprec(&["heatmap", "--csv", "empty.csv", "--value", "cond", "--out", "e.svg"], dir.path()).0);
        assert!(err.contains("empty.csv"), "{err}");

        std::fs::write(dir.path().join("partial.csv"), "problem,level\nl2-trace,2\n").unwrap();
        let err = err_text(fracprec(&["heatmap", "--csv", "partial.csv", "--value", "cond", "--out", "p.svg"], dir.path()).0);
        assert!(err.contains("partial.csv") && err.contains("missing columns"), "{err}");
    }

    #[test]
    fn config_errors_are_reported() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("bad.ini"), "preset = table1\ncolour = blue\n").unwrap();
        let err = err_text(fracprec(&["run", "--config", "bad.ini"], dir.path()).0);
        assert!(err.contains("colour") && err.contains("bad.ini"), "{err}");

        std::fs::write(dir.path().join("cap.ini"), "preset = table1\nlevels = 5\ndense_cap = 100\n").unwrap();
        assert!(fracprec(&["run", "--config", "cap.ini"], dir.path()).0.is_err());
    }

    #[test]
    fn dense_cap_rows_are_flagged() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("t.ini"), "preset = table2\nlevels = 1, 2\npairing = P2-P0\ndense_cap = 100\n").unwrap();
        let (r, out) = fracprec(&["run", "--config", "t.ini"], dir.path());
        r.unwrap();
        let rows: Vec<&str> = out.lines().skip(1).collect();
        assert_eq!(rows.len(), 2);
        assert!(rows[0].ends_with(','));
        assert!(rows[1].ends_with(",,,,1,,dense-cap-exceeded"), "{}", rows[1]);
    }

    #[test]
    fn envelope_verify_cases() {
        let dir = tempfile::tempdir().unwrap();
        let (r, out) = fracprec(&["envelope-verify", "--case", "halfplane"], dir.path());
        r.unwrap();
        assert!(out.starts_with("case,eps_or_h,measured,expected,error\n"));
        for line in out.lines().skip(1) {
            let err: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
            assert!(err <= 1e-10, "{line}");
        }
        let err = err_text(fracprec(&["envelope-verify", "--case", "torus"], dir.path()).0);
        assert!(err.contains("torus"), "{err}");

        std::fs::write(dir.path().join("env.ini"), "preset = envelope-all\ncases = square-corner\n").unwrap();
        let (r, out) = fracprec(&["run", "--config", "env.ini"], dir.path());
        r.unwrap();
        assert_eq!(out.lines().count(), 5);
    }

    #[test]
    fn mesh_gen_and_info() {
        let dir = tempfile::tempdir().unwrap();
        fracprec(&["mesh", "gen", "--nx", "3", "--ny", "2", "--bounds", "0,2,0,1", "--out", "m.mesh"], dir.path()).0.unwrap();
        let (r, info) = fracprec(&["mesh", "info", "m.mesh"], dir.path());
        r.unwrap();
        // Crossed 3×2: (4·3) corner vertices + 6 centres, 24 cells.
        assert!(info.contains("vertices 18\n") && info.contains("cells 24\n"), "{info}");
        let area: f64 = info.lines().find_map(|l| l.strip_prefix("area ")).unwrap().parse().unwrap();
        assert!((area - 2.0).abs() < 1e-12, "{info}");

        assert!(fracprec(&["mesh", "gen", "--bounds", "0,1", "--out", "x.mesh"], dir.path()).0.is_err());
        assert!(fracprec(&["mesh", "info", "missing.mesh"], dir.path()).0.is_err());
    }

    #[test]
    fn unknown_arguments_are_rejected() {
        assert!(Cli::try_parse_from(["fracprec", "run"]).is_err());
        assert!(Cli::try_parse_from(["fracprec", "heatmap", "--csv", "a.csv", "--value", "cond"]).is_err());
        assert!(Cli::try_parse_from(["fracprec", "frobnicate"]).is_err());
    }
}
