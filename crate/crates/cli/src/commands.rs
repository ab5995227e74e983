//! The four subcommands. Each writes its report to `out`, diagnostics to
//! `err`, and returns the process exit code.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use clifford_dynamics::dynamics::{norm, SemisprayField};
use clifford_dynamics::structures::{verify_structure, ProductClass};
use clifford_dynamics::{
    composition_table, derive_el_system, dynamics_residual, el_residual, energy_drift, integrate,
    StructureId, Trajectory,
};

use crate::config::RunConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_DEGENERATE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

fn list(v: &[f64]) -> String {
    // `+ 0.0` folds -0 into 0 for display
    v.iter().map(|x| format!("{:e}", x + 0.0)).collect::<Vec<_>>().join(", ")
}

pub fn cmd_verify(out: &mut impl Write) -> io::Result<i32> {
    let reports: Vec<_> = StructureId::all().map(verify_structure).collect();
    let yes = |b: bool| if b { "ok" } else { "FAIL" };

    writeln!(out, "structure  J^2=-Id  bijective  J^T J=Id  2-form antisymmetric")?;
    for r in &reports {
        writeln!(
            out,
            "{:<10} {:<7} {:<10} {:<8} {}",
            r.id.to_string(),
            yes(r.squares_to_minus_identity),
            yes(r.metric.bijective),
            yes(r.metric.orthogonal),
            yes(r.two_form_antisymmetric)
        )?;
    }

    let count = |f: &dyn Fn(&clifford_dynamics::structures::StructureReport) -> bool| {
        reports.iter().filter(|r| f(r)).count()
    };
    let checks = [
        ("J^2 = -Id", count(&|r| r.squares_to_minus_identity)),
        ("g(JX, JY) = g(X, Y)", count(&|r| r.metric.passed())),
        ("fundamental 2-form antisymmetric", count(&|r| r.two_form_antisymmetric)),
    ];
    for (name, passed) in checks {
        let status = if passed == 6 { "OK" } else { "FAILED" };
        writeln!(out, "{passed}/6 structures: {name} {status}")?;
    }

    let table = composition_table();
    writeln!(out)?;
    writeln!(out, "composition table, entry (a, b) = J_a J_b:")?;
    write!(out, "      ")?;
    for b in StructureId::all() {
        write!(out, "{:>7}", b.to_string())?;
    }
    writeln!(out)?;
    for a in StructureId::all() {
        write!(out, "{:<6}", a.to_string())?;
        for b in StructureId::all() {
            let cell = match ProductClass::classify(table.get(a, b)) {
                ProductClass::Other => "other".to_string(),
                c => c.to_string(),
            };
            write!(out, "{cell:>7}")?;
        }
        writeln!(out)?;
    }
    writeln!(out)?;
    for (a, b, p) in table.iter().filter(|(a, b, _)| a != b) {
        writeln!(out, "({}, {}) {a}{b}: {p}  [{}]", a.get(), b.get(), ProductClass::classify(p))?;
    }
    let closed = table.is_closed();
    let diagonal = table.diagonal_is_negated_identity();
    writeln!(
        out,
        "composition table: {} entries are signed block permutations, diagonal = -Id {}",
        if closed { "all 36" } else { "NOT all" },
        if diagonal { "OK" } else { "FAILED" }
    )?;

    let all_ok = reports.iter().all(|r| r.passed()) && closed && diagonal;
    Ok(if all_ok { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

pub fn cmd_derive(structure: i64, n: i64, out: &mut impl Write, err: &mut impl Write) -> io::Result<i32> {
    let Ok(k) = StructureId::new(structure) else {
        writeln!(err, "error: --structure must be 1..6, got {structure}")?;
        return Ok(EXIT_USAGE);
    };
    if n < 1 {
        writeln!(err, "error: --n must be at least 1, got {n}")?;
        return Ok(EXIT_USAGE);
    }
    out.write_all(derive_el_system(k).render().as_bytes())?;
    Ok(EXIT_OK)
}

fn load(config: &Path, err: &mut impl Write) -> io::Result<Result<RunConfig, i32>> {
    match RunConfig::load(config) {
        Ok(cfg) => Ok(Ok(cfg)),
        Err(e) => {
            writeln!(err, "{e}")?;
            Ok(Err(EXIT_USAGE))
        }
    }
}

fn write_trajectory(path: &Path, traj: &Trajectory, dim: usize) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    traj.write_csv(&mut w, dim)?;
    w.flush()
}

fn summary(out: &mut impl Write, traj: &Trajectory, steps: usize) -> io::Result<()> {
    writeln!(out, "steps completed: {}/{steps}", traj.len().saturating_sub(1))?;
    if let Some(x) = traj.final_state() {
        writeln!(out, "final time: {:e}", traj.times()[traj.len() - 1])?;
        writeln!(out, "final state: {}", list(x))?;
        writeln!(out, "energy drift: {:e}", energy_drift(traj))?;
        writeln!(out, "max EL residual: {:e}", traj.max_el_residual())?;
    }
    Ok(())
}

pub fn cmd_simulate(
    config: &Path,
    out_path: Option<&Path>,
    out: &mut impl Write,
    err: &mut impl Write,
) -> io::Result<i32> {
    let cfg = match load(config, err)? {
        Ok(cfg) => cfg,
        Err(code) => return Ok(code),
    };
    let Some(path) = out_path.map(Path::to_path_buf).or_else(|| cfg.output.clone()) else {
        writeln!(err, "config error at `output`: no output path (set it or pass --out)")?;
        return Ok(EXIT_USAGE);
    };

    let result = integrate(&cfg.lagrangian, cfg.structure, &cfg.x0, cfg.dt, cfg.steps);
    let (traj, failure) = match result {
        Ok(t) => (t, None),
        Err(f) => (f.partial, Some(f.error)),
    };
    if let Err(e) = write_trajectory(&path, &traj, cfg.dim()) {
        writeln!(err, "error: cannot write {}: {e}", path.display())?;
        return Ok(EXIT_USAGE);
    }
    summary(out, &traj, cfg.steps)?;
    writeln!(out, "trajectory: {}", path.display())?;
    match failure {
        None => Ok(EXIT_OK),
        Some(e) => {
            writeln!(err, "error: {e}")?;
            if traj.is_empty() {
                writeln!(err, "no states recorded; {} holds the header only", path.display())?;
            } else {
                writeln!(err, "partial trajectory of {} states kept in {}", traj.len(), path.display())?;
            }
            Ok(EXIT_DEGENERATE)
        }
    }
}

fn parse_state(text: &str, dim: usize) -> Result<Vec<f64>, String> {
    let values = text
        .split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("not a finite real: {s:?}"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if values.len() != dim {
        return Err(format!("expected {dim} values, got {}", values.len()));
    }
    Ok(values)
}

pub fn cmd_check(config: &Path, state: &str, out: &mut impl Write, err: &mut impl Write) -> io::Result<i32> {
    let cfg = match load(config, err)? {
        Ok(cfg) => cfg,
        Err(code) => return Ok(code),
    };
    let x = match parse_state(state, cfg.dim()) {
        Ok(x) => x,
        Err(msg) => {
            writeln!(err, "error: --state: {msg}")?;
            return Ok(EXIT_USAGE);
        }
    };
    let (l, k) = (&cfg.lagrangian, cfg.structure);
    let solved = match SemisprayField::new(l, k).solve(&x) {
        Ok(s) => s,
        Err(e) => {
            writeln!(err, "error: {e}")?;
            return Ok(if e.is_degenerate() { EXIT_DEGENERATE } else { EXIT_USAGE });
        }
    };
    let v = &solved.velocity;
    let diagnostics = el_residual(l, k, &x, v)
        .and_then(|r| Ok((norm(&r), dynamics_residual(l, k, &x, v)?)));
    let (el, dyn_res) = match diagnostics {
        Ok(d) => d,
        Err(e) => {
            writeln!(err, "error: {e}")?;
            return Ok(EXIT_DEGENERATE);
        }
    };
    writeln!(out, "structure: {k}")?;
    writeln!(out, "velocity: {}", list(v))?;
    writeln!(out, "el_residual norm: {el:e}")?;
    writeln!(out, "dynamics_residual: {dyn_res:e}")?;
    writeln!(out, "hessian condition estimate: {:e}", solved.condition)?;
    writeln!(out, "hessian min pivot: {:e}", solved.min_pivot)?;
    if solved.near_degenerate() {
        writeln!(
            out,
            "warning: Hessian is near-degenerate (condition {:e}, min pivot {:e})",
            solved.condition, solved.min_pivot
        )?;
    }
    Ok(EXIT_OK)
}
