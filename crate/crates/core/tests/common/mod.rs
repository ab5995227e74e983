#![allow(dead_code)]

use clifford_dynamics::{Lagrangian, SignedBlockPermutation, StructureId};
use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn id(k: i64) -> StructureId {
    StructureId::new(k).unwrap()
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Random polynomial of degree at most 3 in the 8 coordinates of `n = 1`,
/// returned as text so it goes through the parser.
pub fn random_cubic_text(rng: &mut StdRng) -> String {
    let mut terms = Vec::new();
    for _ in 0..rng.random_range(3..10) {
        let c: f64 = rng.random_range(-2.0..2.0);
        let degree = rng.random_range(1..=3);
        let mut factors = vec![format!("{c:.3}")];
        for _ in 0..degree {
            factors.push(format!("x{}", rng.random_range(0..8)));
        }
        terms.push(format!("({})", factors.join("*")));
    }
    terms.join(" + ")
}

pub fn random_cubic(rng: &mut StdRng) -> Lagrangian {
    Lagrangian::from_text(&random_cubic_text(rng), 1).unwrap()
}

pub fn random_state(rng: &mut StdRng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(-1.5..1.5)).collect()
}

/// `|a - b| <= tol * max(1, |b|)`.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

pub fn fd_gradient(l: &Lagrangian, x: &[f64], h: f64) -> Vec<f64> {
    (0..x.len())
        .map(|a| {
            let mut p = x.to_vec();
            let mut m = x.to_vec();
            p[a] += h;
            m[a] -= h;
            (l.value(&p).unwrap() - l.value(&m).unwrap()) / (2.0 * h)
        })
        .collect()
}

/// Central second differences of the value alone.
pub fn fd_hessian(l: &Lagrangian, x: &[f64], h: f64) -> Vec<Vec<f64>> {
    let dim = x.len();
    let f = |da: usize, sa: f64, db: usize, sb: f64| {
        let mut p = x.to_vec();
        p[da] += sa * h;
        p[db] += sb * h;
        l.value(&p).unwrap()
    };
    (0..dim)
        .map(|a| {
            (0..dim)
                .map(|b| {
                    (f(a, 1.0, b, 1.0) - f(a, 1.0, b, -1.0) - f(a, -1.0, b, 1.0)
                        + f(a, -1.0, b, -1.0))
                        / (4.0 * h * h)
                })
                .collect()
        })
        .collect()
}

/// Dense matrix of `J` built straight from the block tables.
pub fn dense_j(j: &SignedBlockPermutation, n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(8 * n, 8 * n);
    for b in 0..8 {
        for i in 0..n {
            m[(j.target(b) * n + i, b * n + i)] = f64::from(j.sign(b));
        }
    }
    m
}

pub fn dvec(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
