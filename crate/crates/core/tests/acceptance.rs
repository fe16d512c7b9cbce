//! Acceptance criteria 1–10: one PASS/FAIL line each; exits non-zero if
//! any criterion fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use fracprec::envelope::{fe_scaling_probe, ProbeField};
use fracprec::experiment::{envelope_verify, parse_config, run_config, Job, MeshFamily, RunRecord};
use fracprec::fractional::{hs_identity_check, FractionalNorm, HsBoundary};
use fracprec::linalg::LanczosOptions;
use fracprec::mesh::{generate_crossed, Rect};
use fracprec::problems::{build_l2_trace, L2Bc, Pairing, SchurNorm};
use fracprec::solvers::{condition_number, SpectrumMethod};

fn manifest() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

fn runs(text: &str) -> Vec<RunRecord> {
    match parse_config(text, manifest()).expect("config") {
        Job::Runs(cfg) => run_config(&cfg).expect("run"),
        Job::Envelope { .. } => panic!("not a run config"),
    }
}

/// Condition numbers of rows matching `pairing`, `bc`, `precond`, in level order.
fn conds(rows: &[RunRecord], pairing: &str, bc: &str, precond: &str) -> Vec<f64> {
    rows.iter()
        .filter(|r| r.pairing == pairing && r.bc == bc && r.precond == precond)
        .map(|r| r.cond.unwrap_or(f64::NAN))
        .collect()
}

fn within(v: f64, target: f64, tol: f64) -> bool {
    (v / target - 1.0).abs() <= tol
}

fn all_within(vs: &[f64], targets: &[f64], tol: f64) -> bool {
    vs.len() == targets.len() && vs.iter().zip(targets).all(|(v, t)| within(*v, *t, tol))
}

fn ratios(vs: &[f64]) -> Vec<f64> {
    vs.windows(2).map(|w| w[1] / w[0]).collect()
}

fn spread(vs: &[f64]) -> f64 {
    let (lo, hi) = vs.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    hi / lo
}

fn fmt(vs: &[f64]) -> String {
    vs.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>().join("/")
}

fn sci(vs: &[f64]) -> String {
    vs.iter().map(|v| format!("{v:.1e}")).collect::<Vec<_>>().join("/")
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(parts: &[(bool, String)]) -> Outcome {
    Outcome {
        pass: parts.iter().all(|p| p.0),
        detail: parts
            .iter()
            .map(|(ok, d)| format!("{}{d}", if *ok { "" } else { "✗ " }))
            .collect::<Vec<_>>()
            .join("; "),
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    let t = start.elapsed();
    let ok = t <= limit;
    out.pass &= ok;
    out.detail = format!("{}{}; {:.1}s (limit {}s)", out.detail, if ok { "" } else { " ✗" }, t.as_secs_f64(), limit.as_secs());
    out
}

fn minutes(m: u64) -> Duration {
    Duration::from_secs(60 * m)
}

fn table1() -> Outcome {
    let rows = runs("preset = table1\nlevels = 2..5\n");
    let hinv = conds(&rows, "P2-P1", "none", "hinv-mass");
    let id = conds(&rows, "P2-P1", "none", "identity-mass");
    let fr = conds(&rows, "P2-P1", "none", "fractional(-0.5)");
    check(&[
        (
            hinv.iter().all(|v| within(*v, 4.63, 0.05)) && ratios(&hinv).iter().all(|r| (r - 1.0).abs() <= 0.02),
            format!("hinv {}", fmt(&hinv)),
        ),
        (
            all_within(&id, &[8.72, 12.11, 16.91, 23.70], 0.05) && ratios(&id).iter().all(|r| (r - 1.40).abs() <= 0.1),
            format!("identity {}", fmt(&id)),
        ),
        (
            all_within(&fr, &[24.08, 47.84, 95.15, 189.9], 0.10) && ratios(&fr).iter().all(|r| (r - 2.0).abs() <= 0.15),
            format!("fractional {}", fmt(&fr)),
        ),
    ])
}

fn table3() -> Outcome {
    let rows = runs("preset = table3\nlevels = 2..5\n");
    let bc = "neumann-intersect";
    let hinv = conds(&rows, "P2-P1", bc, "hinv-mass");
    let id = conds(&rows, "P2-P1", bc, "identity-mass");
    let fr = conds(&rows, "P2-P1", bc, "fractional(0.5)");
    check(&[
        (hinv.len() == 4 && hinv.iter().all(|v| within(*v, 4.88, 0.05)), format!("hinv {} (target 4.88)", fmt(&hinv))),
        (
            all_within(&id, &[6.70, 9.27, 12.89, 18.01], 0.05),
            format!("identity {} (target 6.70/9.27/12.89/18.01)", fmt(&id)),
        ),
        (
            all_within(&fr, &[11.99, 14.55, 18.47, 24.44], 0.10),
            format!("fractional {} (target 11.99/14.55/18.47/24.44)", fmt(&fr)),
        ),
    ])
}

fn table4() -> Outcome {
    let rows = runs("preset = table4\nlevels = 1..4\n");
    let (n, d) = ("neumann-intersect", "dirichlet-intersect");
    let p1n = conds(&rows, "P2-P1", n, "hinv-mass");
    let p1d = conds(&rows, "P2-P1", d, "hinv-mass");
    let p0n = conds(&rows, "P2-P0", n, "hinv-mass");
    let p0d = conds(&rows, "P2-P0", d, "hinv-mass");
    let p0d_target = [3.48, 3.49, 3.49, 3.49];
    check(&[
        (p1n.len() == 4 && p1n.iter().all(|v| within(*v, 4.88, 0.05)), format!("P2-P1 N {} (target 4.88)", fmt(&p1n))),
        (p1d.len() == 4 && p1d.iter().all(|v| within(*v, 5.34, 0.05)), format!("P2-P1 D {} (target 5.34)", fmt(&p1d))),
        (p0n.len() == 4 && p0n.iter().all(|v| within(*v, 3.49, 0.05)), format!("P2-P0 N {}", fmt(&p0n))),
        (all_within(&p0d, &p0d_target, 0.05), format!("P2-P0 D {}", fmt(&p0d))),
    ])
}

fn table2() -> Outcome {
    let us = runs("preset = table2\nlevels = 1..5\n");
    let mut parts = Vec::new();
    for pairing in ["P2-P1", "P2-P0"] {
        let c = conds(&us, pairing, "none", "hinv-mass");
        parts.push((
            c.len() == 5 && c.iter().all(|v| within(*v, 4.63, 0.05)) && spread(&c) <= 1.05,
            format!("us {pairing} {}", fmt(&c)),
        ));
    }
    for fam in ["uu", "nu"] {
        let rows = runs(&format!("preset = table2\nmesh = fixtures/{fam}.mesh\nlevels = 1..4\n"));
        for pairing in ["P2-P1", "P2-P0"] {
            let c = conds(&rows, pairing, "none", "hinv-mass");
            parts.push((
                c.len() == 4 && c.iter().all(|v| v.is_finite() && *v < 100.0) && spread(&c) <= 1.25,
                format!("{fam} {pairing} {} (max/min {:.3})", fmt(&c), spread(&c)),
            ));
        }
    }
    check(&parts)
}

const GRID: [f64; 3] = [1.0, 1e-4, 1e-8];

fn ds_rows(precond: &str, levels: &str, mode: &str, mu: &str, k: &str) -> Vec<RunRecord> {
    runs(&format!(
        "problem = darcy-stokes\nprecond = {precond}\nlevels = {levels}\nmu = {mu}\nK = {k}\nalpha = 1\nmode = {mode}\n"
    ))
}

fn cell<'a>(rows: &'a [RunRecord], mu: f64, k: f64) -> impl Iterator<Item = &'a RunRecord> {
    rows.iter().filter(move |r| r.mu == Some(mu) && r.k == Some(k))
}

fn darcy_stokes_robust() -> Outcome {
    let cond_rows = ds_rows("robust-ds", "2..4", "condition", "1, 1e-4, 1e-8", "1, 1e-4, 1e-8");
    let it_rows = ds_rows("robust-ds", "2..6", "iterations", "1, 1e-4, 1e-8", "1, 1e-4, 1e-8");
    let mut parts = Vec::new();
    let mut global = 0.0f64;
    for mu in GRID {
        for k in GRID {
            let c: Vec<f64> = cell(&cond_rows, mu, k).map(|r| r.cond.unwrap_or(f64::NAN)).collect();
            let it: Vec<f64> = cell(&it_rows, mu, k)
                .map(|r| if r.converged == Some(true) { r.iterations.unwrap() as f64 } else { f64::NAN })
                .collect();
            global = c.iter().fold(global, |m, v| m.max(*v));
            parts.push((
                c.len() == 3 && spread(&c) <= 1.5 && it.len() == 5 && spread(&it) <= 2.0,
                format!("μ={mu:e},K={k:e} cond {} its {}", fmt(&c), it.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("/")),
            ));
        }
    }
    parts.push((global <= 100.0, format!("max cond {global:.3}")));
    check(&parts)
}

fn darcy_stokes_naive() -> Outcome {
    let rows = ds_rows("naive-ds", "2..4", "condition", "1, 1e-8", "1, 1e-8");
    let series = |mu: f64, k: f64| cell(&rows, mu, k).map(|r| r.cond.unwrap_or(f64::NAN)).collect::<Vec<_>>();
    let growth = series(1.0, 1e-8);
    let stable = series(1e-8, 1.0);
    let evidence = series(1.0, 1.0);
    let out = check(&[
        (
            growth.len() == 3 && ratios(&growth).iter().all(|r| *r >= 1.2),
            format!("μ=1,K=1e-8 {} (ratios {})", fmt(&growth), fmt(&ratios(&growth))),
        ),
        (stable.len() == 3 && spread(&stable) <= 1.25, format!("μ=1e-8,K=1 {}", fmt(&stable))),
    ]);
    println!(
        "      evidence: naive μ=1,K=1 {} (ratios {})",
        fmt(&evidence),
        fmt(&ratios(&evidence))
    );
    out
}

fn envelope_exactness() -> Outcome {
    let mut rows = envelope_verify("halfplane").unwrap();
    rows.extend(envelope_verify("disk").unwrap());
    let half: Vec<f64> = rows
        .iter()
        .filter(|r| r.case == "halfplane" && matches!(r.eps_or_h, Some(e) if e == 0.1 || e == 0.01))
        .map(|r| r.error)
        .collect();
    let disk: Vec<f64> = rows.iter().filter(|r| r.case == "disk" && r.eps_or_h == Some(0.1)).map(|r| r.error).collect();
    let slope = rows.iter().find(|r| r.case == "disk-trace-pair-slope").map_or(f64::NAN, |r| r.measured);
    check(&[
        (half.len() == 2 && half.iter().all(|e| *e <= 1e-10), format!("halfplane errors {}", sci(&half))),
        (disk.len() == 1 && disk[0] <= 1e-8, format!("disk (1−ε/2) error {}", sci(&disk))),
        ((slope - 1.0).abs() <= 0.15, format!("trace pairing slope {slope:.3}")),
    ])
}

fn fe_scaling() -> Outcome {
    let rep = fe_scaling_probe(&MeshFamily::Structured, &[3, 4, 5, 6, 7], ProbeField::BoundaryStrip).unwrap();
    check(&[((rep.slope + 0.5).abs() <= 0.1, format!("fitted exponent {:.4}", rep.slope))])
}

fn identities() -> Outcome {
    let mesh = generate_crossed(16, 16, Rect::UNIT).unwrap();
    let sys = build_l2_trace(&mesh, Pairing::P2P1, L2Bc::None, SchurNorm::HinvMass).unwrap();
    let f = FractionalNorm::for_space(&sys.fields[1].space, &HsBoundary::None).unwrap();
    let (m, a) = (f.mass().clone(), f.stiffness().clone());
    let rel = |x: &fracprec::linalg::DenseMatrix, y: &fracprec::linalg::DenseMatrix| {
        x.add_scaled(y, -1.0).unwrap().max_abs() / y.max_abs()
    };
    let h0 = rel(&f.matrix(0.0), &m);
    let h1 = rel(&f.matrix(1.0), &a.add_scaled(&m, 1.0).unwrap());
    let inv = [0.5, 0.25, 1.0].iter().map(|&s| hs_identity_check(&m, &a, s).unwrap()).fold(0.0f64, f64::max);

    let mesh = generate_crossed(8, 8, Rect::UNIT).unwrap();
    let mut worst = 0.0f64;
    for norm in [SchurNorm::IdentityMass, SchurNorm::Fractional(-0.5), SchurNorm::HinvMass] {
        let sys = build_l2_trace(&mesh, Pairing::P2P1, L2Bc::None, norm).unwrap();
        let dense = condition_number(&sys, SpectrumMethod::default()).unwrap().condition;
        let opts = LanczosOptions { tol: 1e-10, max_iterations: 3000, seed: 1 };
        let lz = condition_number(&sys, SpectrumMethod::Iterative(opts)).unwrap().condition;
        worst = worst.max((lz / dense - 1.0).abs());
    }
    check(&[
        (h0 <= 1e-10, format!("H(0)=M {h0:.1e}")),
        (h1 <= 1e-10, format!("H(1)=A+M {h1:.1e}")),
        (inv <= 1e-8, format!("H(s)M⁻¹H(−s)=M {inv:.1e}")),
        (worst <= 0.01, format!("dense vs Lanczos {:.2e}", worst)),
    ])
}

fn determinism() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_fracprec");
    let preset: PathBuf = manifest().join("../../presets/table1.ini");
    let dir = std::env::temp_dir().join(format!("fracprec-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut outputs = Vec::new();
    for k in 0..2 {
        let out = dir.join(format!("run{k}.csv"));
        let status = Command::new(exe)
            .args(["run", "--config"])
            .arg(&preset)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        outputs.push((status.success(), std::fs::read(&out).unwrap_or_default()));
    }
    let _ = std::fs::remove_dir_all(&dir);
    let same = outputs[0].1 == outputs[1].1 && !outputs[0].1.is_empty();
    check(&[(
        outputs.iter().all(|o| o.0) && same,
        format!("two runs of presets/table1.ini, {} bytes, identical: {same}", outputs[0].1.len()),
    )])
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Outcome); 10] = [
        ("Table 1 (L² trace, structured)", minutes(5), table1),
        ("Table 3 (Babuška Neumann, P2-P1)", minutes(5), table3),
        ("Table 4 (Babuška, both bcs)", minutes(5), table4),
        ("Table 2 (structured; uu/nu property)", minutes(5), table2),
        ("Darcy–Stokes robustness", minutes(20), darcy_stokes_robust),
        ("naive Darcy–Stokes non-robustness", minutes(20), darcy_stokes_naive),
        ("envelope exactness", minutes(1), envelope_exactness),
        ("FE scaling probe", minutes(5), fe_scaling),
        ("algebraic identities", minutes(5), identities),
        ("determinism", minutes(5), determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, limit, f)) in criteria.into_iter().enumerate() {
        let out = timed(limit, f);
        let tag = if out.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {tag}: {name}: {}", i + 1, out.detail);
        if !out.pass {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
