//! Acceptance suite: one `[PASS]`/`[FAIL]` line per criterion, non-zero
//! exit if any fails. Oracles here are independent of the library's own
//! solver paths (central differences, nalgebra dense LU and matrix
//! exponential, closed-form rotation).

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use clifford_dynamics::dynamics::norm;
use clifford_dynamics::structures::BLOCKS;
use clifford_dynamics::{
    builtin_lagrangian, builtin_structure, composition_table, derive_el_system, el_residual,
    energy_drift, integrate, kaehler_form, solve_semispray, vertical_differential, Lagrangian,
    SignedBlockPermutation, StructureId,
};
use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use tempfile::TempDir;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, budget_s: f64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < budget_s, || {
        format!("took {:.3} s, budget {budget_s} s", elapsed.as_secs_f64())
    })
}

fn dense_j(k: StructureId) -> DMatrix<f64> {
    let j = builtin_structure(k);
    let mut m = DMatrix::zeros(BLOCKS, BLOCKS);
    for b in 0..BLOCKS {
        m[(j.target(b), b)] = f64::from(j.sign(b));
    }
    m
}

// 1. exact structure algebra
fn structure_algebra() -> Outcome {
    let start = Instant::now();
    for k in StructureId::all() {
        let j = builtin_structure(k);
        ensure(j.compose(&j) == SignedBlockPermutation::negated_identity(), || {
            format!("{k}: J^2 != -Id")
        })?;
        // JᵀJ over blocks in integers
        for r in 0..BLOCKS {
            for c in 0..BLOCKS {
                let dot: i32 = (0..BLOCKS)
                    .map(|b| {
                        let col = |x: usize| if j.target(x) == b { i32::from(j.sign(x)) } else { 0 };
                        col(r) * col(c)
                    })
                    .sum();
                ensure(dot == i32::from(r == c), || format!("{k}: (JᵀJ)[{r}][{c}] = {dot}"))?;
            }
        }
    }
    let table = composition_table();
    let mut entries = 0;
    for (a, b, p) in table.iter() {
        entries += 1;
        let mut seen = [false; BLOCKS];
        for x in 0..BLOCKS {
            seen[p.target(x)] = true;
            ensure(p.sign(x).abs() == 1, || format!("{a}{b}: bad sign"))?;
        }
        ensure(seen.iter().all(|&s| s), || format!("{a}{b}: not a permutation"))?;
    }
    ensure(entries == 36, || format!("{entries} table entries"))?;
    let elapsed = start.elapsed();
    within(elapsed, 1.0)?;
    Ok(format!("6 tables, 36 products closed, {:.3} s", elapsed.as_secs_f64()))
}

// 2. derive output against the transcribed listings
fn golden_el_systems() -> Outcome {
    let start = Instant::now();
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let mut equations = 0;
    for k in 1..=6 {
        let want = std::fs::read_to_string(dir.join(format!("derive_J{k}.txt")))
            .map_err(|e| format!("golden J{k}: {e}"))?;
        let out = Command::new(env!("CARGO_BIN_EXE_ckdyn"))
            .args(["derive", "--structure", &k.to_string(), "--n", "1"])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), || format!("derive J{k} exit {:?}", out.status.code()))?;
        let got = String::from_utf8_lossy(&out.stdout);
        for (i, (g, w)) in got.lines().zip(want.lines()).enumerate() {
            ensure(g == w, || format!("J{k} line {}: got {g:?}, want {w:?}", i + 1))?;
            equations += 1;
        }
        ensure(got.lines().count() == 8 && want.lines().count() == 8, || {
            format!("J{k}: line count")
        })?;
    }
    ensure(equations == 48, || format!("{equations} equations"))?;
    let elapsed = start.elapsed();
    within(elapsed, 1.0)?;
    Ok(format!("48/48 equations match, {:.3} s", elapsed.as_secs_f64()))
}

// 3. EL pairing is the structure table
fn unification() -> Outcome {
    for k in StructureId::all() {
        let j = builtin_structure(k);
        for eq in derive_el_system(k).equations() {
            ensure(
                eq.paired_block == j.target(eq.block) && eq.sign == j.sign(eq.block),
                || format!("{k} block {}", eq.block),
            )?;
        }
    }
    Ok("(sigma, s) == (target, sign) for J1..J6".into())
}

fn random_cubic(r: &mut StdRng) -> Lagrangian {
    let mut terms = Vec::new();
    for _ in 0..r.random_range(4..12) {
        let mut t = format!("{:.4}", r.random_range(-2.0..2.0));
        for _ in 0..r.random_range(1..=3) {
            t.push_str(&format!("*x{}", r.random_range(0..BLOCKS)));
        }
        terms.push(t);
    }
    Lagrangian::from_text(&terms.join(" + "), 1).expect("generated text parses")
}

fn rel_ok(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

// 4. derivatives, form antisymmetry, vertical differential
fn calculus_consistency() -> Outcome {
    let mut r = StdRng::seed_from_u64(0xC0FFEE);
    let (mut fd_err, mut anti, mut vd_err) = (0.0f64, 0.0f64, 0.0f64);
    let count = 120;
    for trial in 0..count {
        let l = random_cubic(&mut r);
        let x: Vec<f64> = (0..BLOCKS).map(|_| r.random_range(-1.0..1.0)).collect();
        let g = l.gradient(&x).map_err(|e| e.to_string())?;
        let h = l.hessian(&x).map_err(|e| e.to_string())?;
        let f = |y: &[f64]| l.value(y).unwrap();
        let shifted = |d: &[(usize, f64)]| {
            let mut y = x.clone();
            for &(a, s) in d {
                y[a] += s;
            }
            y
        };
        let (hg, hh) = (1e-5, 1e-4);
        for a in 0..BLOCKS {
            let fd = (f(&shifted(&[(a, hg)])) - f(&shifted(&[(a, -hg)]))) / (2.0 * hg);
            ensure(rel_ok(g[a], fd, 1e-6), || format!("trial {trial}: dL/dx{a} {} vs {fd}", g[a]))?;
            fd_err = fd_err.max((g[a] - fd).abs() / fd.abs().max(1.0));
            for b in 0..BLOCKS {
                let fd = (f(&shifted(&[(a, hh), (b, hh)])) - f(&shifted(&[(a, hh), (b, -hh)]))
                    - f(&shifted(&[(a, -hh), (b, hh)]))
                    + f(&shifted(&[(a, -hh), (b, -hh)])))
                    / (4.0 * hh * hh);
                ensure(rel_ok(h[(a, b)], fd, 1e-6), || {
                    format!("trial {trial}: H[{a}][{b}] {} vs {fd}", h[(a, b)])
                })?;
                fd_err = fd_err.max((h[(a, b)] - fd).abs() / fd.abs().max(1.0));
            }
        }
        let jt_grad_oracle = |k: StructureId| dense_j(k).transpose() * DVector::from_column_slice(&g);
        for k in StructureId::all() {
            let a = kaehler_form(&l, k).coefficients(&x).map_err(|e| e.to_string())?;
            anti = anti.max(a.antisymmetry_defect());
            let w = vertical_differential(&l, k).evaluate(&x).map_err(|e| e.to_string())?;
            let want = jt_grad_oracle(k);
            for i in 0..BLOCKS {
                vd_err = vd_err.max((w[i] - want[i]).abs() / want[i].abs().max(1.0));
            }
        }
    }
    ensure(anti <= 1e-12, || format!("antisymmetry defect {anti:e}"))?;
    ensure(vd_err <= 1e-9, || format!("vertical differential error {vd_err:e}"))?;
    Ok(format!(
        "{count} cubics: fd err {fd_err:.1e}, antisym {anti:.1e}, d_J err {vd_err:.1e}"
    ))
}

// 5. semispray against Q⁻¹ J Q x
fn semispray_oracle() -> Outcome {
    let (mut worst, mut worst_res) = (0.0f64, 0.0f64);
    for seed in 0..20u64 {
        let mut r = StdRng::seed_from_u64(500 + seed);
        let b = DMatrix::from_fn(BLOCKS, BLOCKS, |_, _| r.random_range(-1.0..1.0));
        let q = b.transpose() * &b + DMatrix::identity(BLOCKS, BLOCKS) * 0.5;
        let mut terms = Vec::new();
        for i in 0..BLOCKS {
            for j in 0..BLOCKS {
                terms.push(format!("{:e}*x{i}*x{j}", 0.5 * q[(i, j)]));
            }
        }
        let l = Lagrangian::from_text(&terms.join(" + "), 1).map_err(|e| e.to_string())?;
        let lu = q.clone().lu();
        for k in StructureId::all() {
            let x: Vec<f64> = (0..BLOCKS).map(|_| r.random_range(-1.0..1.0)).collect();
            let rhs = dense_j(k) * &q * DVector::from_column_slice(&x);
            let want = lu.solve(&rhs).ok_or("oracle LU failed")?;
            let got = solve_semispray(&l, k, &x).map_err(|e| format!("seed {seed} {k}: {e}"))?;
            let err = (DVector::from_column_slice(&got) - &want).norm() / want.norm().max(f64::MIN_POSITIVE);
            worst = worst.max(err);
            let res = norm(&el_residual(&l, k, &x, &got).map_err(|e| e.to_string())?);
            worst_res = worst_res.max(res);
        }
    }
    ensure(worst <= 1e-9, || format!("relative error {worst:e}"))?;
    ensure(worst_res <= 1e-9, || format!("el_residual {worst_res:e}"))?;
    Ok(format!("20 seeds x 6 structures: rel err {worst:.1e}, el_residual {worst_res:.1e}"))
}

fn isotropic() -> Lagrangian {
    builtin_lagrangian("isotropic", 1, &Default::default()).unwrap()
}

fn closed_form(k: StructureId, x0: &[f64], t: f64) -> Vec<f64> {
    let jx = builtin_structure(k).apply(x0).unwrap();
    x0.iter().zip(&jx).map(|(a, b)| t.cos() * a + t.sin() * b).collect()
}

fn max_state_error(l: &Lagrangian, k: StructureId, x0: &[f64], h: f64, steps: usize) -> Result<f64, String> {
    let traj = integrate(l, k, x0, h, steps).map_err(|e| e.to_string())?;
    Ok(traj
        .times()
        .iter()
        .zip(traj.states())
        .flat_map(|(&t, x)| {
            let want = closed_form(k, x0, t);
            x.iter().zip(want).map(|(a, b)| (a - b).abs()).collect::<Vec<_>>()
        })
        .fold(0.0, f64::max))
}

fn initial_state(k: StructureId) -> Vec<f64> {
    let mut r = StdRng::seed_from_u64(u64::from(k.get()));
    (0..BLOCKS).map(|_| r.random_range(-1.0..1.0)).collect()
}

// 6. closed-form rotation over t in [0, 10]
fn closed_form_trajectory() -> Outcome {
    let start = Instant::now();
    let l = isotropic();
    let (h, steps) = (1e-3, 10_000);
    let (mut err, mut e_drift, mut n_drift, mut oracle_gap) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for k in StructureId::all() {
        let x0 = initial_state(k);
        let traj = integrate(&l, k, &x0, h, steps).map_err(|e| e.to_string())?;
        ensure(traj.len() == steps + 1, || "short trajectory".into())?;
        let j = dense_j(k);
        let n0 = norm(&x0);
        for (i, (&t, x)) in traj.times().iter().zip(traj.states()).enumerate() {
            let want = closed_form(k, &x0, t);
            err = err.max(x.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
            n_drift = n_drift.max((norm(x) - n0).abs());
            if i % 500 == 0 {
                let exp = (&j * t).exp() * DVector::from_column_slice(&x0);
                for a in 0..BLOCKS {
                    oracle_gap = oracle_gap.max((exp[a] - want[a]).abs());
                    err = err.max((exp[a] - x[a]).abs());
                }
            }
        }
        e_drift = e_drift.max(energy_drift(&traj));
    }
    let elapsed = start.elapsed();
    ensure(oracle_gap <= 1e-12, || format!("closed form vs matrix exp {oracle_gap:e}"))?;
    ensure(err <= 1e-8, || format!("state error {err:e}"))?;
    ensure(e_drift <= 1e-8, || format!("energy drift {e_drift:e}"))?;
    ensure(n_drift <= 1e-8, || format!("norm drift {n_drift:e}"))?;
    within(elapsed, 10.0)?;
    Ok(format!(
        "6 structures: err {err:.1e}, energy drift {e_drift:.1e}, norm drift {n_drift:.1e}, {:.2} s",
        elapsed.as_secs_f64()
    ))
}

// 7. halving h divides the error by about 16
fn convergence_order() -> Outcome {
    let l = isotropic();
    let mut ratios = Vec::new();
    for k in StructureId::all() {
        let x0 = initial_state(k);
        let coarse = max_state_error(&l, k, &x0, 1e-2, 1000)?;
        let fine = max_state_error(&l, k, &x0, 5e-3, 2000)?;
        let ratio = coarse / fine;
        ensure((12.0..=20.0).contains(&ratio), || format!("{k}: ratio {ratio:.2}"))?;
        ratios.push(ratio);
    }
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &r| (lo.min(r), hi.max(r)));
    Ok(format!("error ratio in [{lo:.2}, {hi:.2}]"))
}

// 8. linear and constant Lagrangians exit 2 from simulate, every time
fn degeneracy_handling() -> Outcome {
    let dir = TempDir::new().map_err(|e| e.to_string())?;
    for (name, text) in [("linear", "x0 + 2*x5"), ("constant", "3.5")] {
        let cfg = dir.path().join(format!("{name}.json"));
        let body = serde_json::json!({
            "n": 1, "structure": 4, "lagrangian": {"text": text},
            "x0": [1, 0, 0, 0, 0, 0, 0, 0], "dt": 1e-3, "steps": 100,
            "output": format!("{name}.csv"),
        });
        std::fs::write(&cfg, body.to_string()).map_err(|e| e.to_string())?;
        let mut runs = Vec::new();
        for _ in 0..2 {
            let out = Command::new(env!("CARGO_BIN_EXE_ckdyn"))
                .args(["simulate", "--config", cfg.to_str().unwrap()])
                .output()
                .map_err(|e| e.to_string())?;
            ensure(out.status.code() == Some(2), || {
                format!("{name}: exit {:?}", out.status.code())
            })?;
            let stderr = String::from_utf8_lossy(&out.stderr).into_owned();
            ensure(stderr.contains("degenerate Lagrangian"), || format!("{name}: {stderr}"))?;
            runs.push((out.stdout, stderr));
        }
        ensure(runs[0] == runs[1], || format!("{name}: output differs between runs"))?;
    }
    Ok("linear and constant: exit 2, identical output across runs".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("AC1 structure algebra", structure_algebra),
        ("AC2 golden EL systems", golden_el_systems),
        ("AC3 unification", unification),
        ("AC4 calculus consistency", calculus_consistency),
        ("AC5 semispray oracle", semispray_oracle),
        ("AC6 closed-form trajectory", closed_form_trajectory),
        ("AC7 convergence order", convergence_order),
        ("AC8 degeneracy handling", degeneracy_handling),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {name}: {detail}");
            }
        }
    }
    println!("{}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
