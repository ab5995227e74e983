//! Data-parallel batch entry points.
//!
//! With the `parallel` feature (on by default) these fan out over rayon's
//! global pool; without it they run the same per-item work sequentially.
//! The `*_sequential` variants are always available so the two paths can be
//! compared on one build.

#![allow(clippy::result_large_err)]

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::dynamics::{DynamicsError, SemisprayField, SemisprayVelocity};
use crate::expr::Lagrangian;
use crate::integrate::{integrate, IntegrationFailure, Trajectory};
use crate::structures::StructureId;

/// Below this many rows, Hessian evaluation stays on the calling thread.
pub const ROW_PARALLEL_THRESHOLD: usize = 64;

/// Evaluates `f` for every row index and collects in order, stopping at the
/// first error.
pub(crate) fn map_rows<T, E, F>(rows: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if rows >= ROW_PARALLEL_THRESHOLD {
        return (0..rows).into_par_iter().map(f).collect();
    }
    (0..rows).map(f).collect()
}

pub type EnsembleResult = Result<Trajectory, IntegrationFailure>;

/// Integrates one trajectory per initial state.
pub fn integrate_ensemble(
    l: &Lagrangian,
    k: StructureId,
    initial_states: &[Vec<f64>],
    h: f64,
    steps: usize,
) -> Vec<EnsembleResult> {
    #[cfg(feature = "parallel")]
    {
        initial_states
            .par_iter()
            .map(|x0| integrate(l, k, x0, h, steps))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        integrate_ensemble_sequential(l, k, initial_states, h, steps)
    }
}

pub fn integrate_ensemble_sequential(
    l: &Lagrangian,
    k: StructureId,
    initial_states: &[Vec<f64>],
    h: f64,
    steps: usize,
) -> Vec<EnsembleResult> {
    initial_states
        .iter()
        .map(|x0| integrate(l, k, x0, h, steps))
        .collect()
}

/// Solves the semispray at every state.
pub fn solve_batch(
    l: &Lagrangian,
    k: StructureId,
    states: &[Vec<f64>],
) -> Vec<Result<SemisprayVelocity, DynamicsError>> {
    let field = SemisprayField::new(l, k);
    #[cfg(feature = "parallel")]
    {
        states.par_iter().map(|x| field.solve(x)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        states.iter().map(|x| field.solve(x)).collect()
    }
}

pub fn solve_batch_sequential(
    l: &Lagrangian,
    k: StructureId,
    states: &[Vec<f64>],
) -> Vec<Result<SemisprayVelocity, DynamicsError>> {
    let field = SemisprayField::new(l, k);
    states.iter().map(|x| field.solve(x)).collect()
}

/// Runs `f` once per structure `J1..J6`, in order.
pub fn for_each_structure<T, F>(f: F) -> Vec<T>
where
    T: Send,
    F: Fn(StructureId) -> T + Sync + Send,
{
    let ids: Vec<StructureId> = StructureId::all().collect();
    #[cfg(feature = "parallel")]
    {
        ids.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        ids.into_iter().map(f).collect()
    }
}
