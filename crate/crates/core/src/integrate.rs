//! Fixed-step classical RK4 on `ẋ = v(x)` with per-state diagnostics.

use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::calculus::energy;
use crate::dynamics::{el_residual, norm, DynamicsError, SemisprayField};
use crate::expr::{Lagrangian, LagrangianError};
use crate::structures::StructureId;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrateError {
    #[error("step size must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("step count must be at least 1")]
    ZeroSteps,
    #[error("initial state has length {got}, expected {expected}")]
    StateLength { got: usize, expected: usize },
    #[error("at step {step}: {source}")]
    Dynamics {
        step: usize,
        #[source]
        source: DynamicsError,
    },
    #[error("non-finite state at step {step}")]
    NonFiniteState { step: usize },
}

impl IntegrateError {
    pub fn is_degenerate(&self) -> bool {
        matches!(self, IntegrateError::Dynamics { source, .. } if source.is_degenerate())
    }
}

/// Integration stopped early; `partial` holds every state recorded before
/// the failure.
#[derive(Debug, Clone, Error)]
#[error("{error}")]
pub struct IntegrationFailure {
    pub partial: Trajectory,
    pub error: IntegrateError,
}

/// Uniformly sampled states with the energy and EL residual norm at each.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    structure: StructureId,
    step: f64,
    times: Vec<f64>,
    states: Vec<Vec<f64>>,
    energies: Vec<f64>,
    el_residual_norms: Vec<f64>,
}

impl Trajectory {
    fn empty(structure: StructureId, step: f64) -> Self {
        Self {
            structure,
            step,
            times: Vec::new(),
            states: Vec::new(),
            energies: Vec::new(),
            el_residual_norms: Vec::new(),
        }
    }

    fn push(&mut self, t: f64, state: Vec<f64>, energy: f64, residual: f64) {
        self.times.push(t);
        self.states.push(state);
        self.energies.push(energy);
        self.el_residual_norms.push(residual);
    }

    pub fn structure(&self) -> StructureId {
        self.structure
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn el_residual_norms(&self) -> &[f64] {
        &self.el_residual_norms
    }

    pub fn final_state(&self) -> Option<&[f64]> {
        self.states.last().map(Vec::as_slice)
    }

    pub fn max_el_residual(&self) -> f64 {
        self.el_residual_norms.iter().copied().fold(0.0, f64::max)
    }

    /// CSV with header `t,x0,..,x{8n-1},energy,el_residual`, LF line endings
    /// and 17 significant digits per value.
    pub fn write_csv<W: Write>(&self, mut out: W, dim: usize) -> io::Result<()> {
        let mut header = String::from("t");
        for a in 0..dim {
            header.push_str(&format!(",x{a}"));
        }
        header.push_str(",energy,el_residual\n");
        out.write_all(header.as_bytes())?;
        for i in 0..self.len() {
            let mut line = fmt_real(self.times[i]);
            for v in &self.states[i] {
                line.push(',');
                line.push_str(&fmt_real(*v));
            }
            line.push(',');
            line.push_str(&fmt_real(self.energies[i]));
            line.push(',');
            line.push_str(&fmt_real(self.el_residual_norms[i]));
            line.push('\n');
            out.write_all(line.as_bytes())?;
        }
        Ok(())
    }

    /// Reads back what [`Trajectory::write_csv`] produced. The step is taken
    /// from the first two rows when present.
    pub fn read_csv<R: BufRead>(input: R, structure: StructureId) -> io::Result<Self> {
        let bad = |msg: String| io::Error::new(io::ErrorKind::InvalidData, msg);
        let mut lines = input.lines();
        let header = lines.next().ok_or_else(|| bad("missing header".into()))??;
        let columns: Vec<&str> = header.split(',').collect();
        if columns.len() < 3
            || columns[0] != "t"
            || columns[columns.len() - 2] != "energy"
            || columns[columns.len() - 1] != "el_residual"
        {
            return Err(bad(format!("unexpected header {header:?}")));
        }
        let dim = columns.len() - 3;
        let mut traj = Trajectory::empty(structure, 0.0);
        for (row, line) in lines.enumerate() {
            let line = line?;
            let values = line
                .split(',')
                .map(|f| f.parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| bad(format!("row {row}: {e}")))?;
            if values.len() != dim + 3 {
                return Err(bad(format!("row {row}: expected {} fields", dim + 3)));
            }
            traj.push(
                values[0],
                values[1..=dim].to_vec(),
                values[dim + 1],
                values[dim + 2],
            );
        }
        if traj.len() >= 2 {
            traj.step = traj.times[1] - traj.times[0];
        }
        Ok(traj)
    }
}

fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

fn stage(x: &[f64], k: &[f64], scale: f64) -> Vec<f64> {
    x.iter().zip(k).map(|(a, b)| a + scale * b).collect()
}

/// Energy and EL residual norm at `x` with the solved velocity `v`.
fn diagnostics(
    l: &Lagrangian,
    k: StructureId,
    x: &[f64],
    v: &[f64],
) -> Result<(f64, f64), LagrangianError> {
    let e = energy(l, k, x, v)?;
    let r = norm(&el_residual(l, k, x, v)?);
    Ok((e, r))
}

/// Integrates `steps` RK4 steps of size `h` from `x0`.
// the error carries the partial trajectory by value
#[allow(clippy::result_large_err)]
pub fn integrate(
    l: &Lagrangian,
    k: StructureId,
    x0: &[f64],
    h: f64,
    steps: usize,
) -> Result<Trajectory, IntegrationFailure> {
    let mut traj = Trajectory::empty(k, h);
    let fail = |traj: Trajectory, error| IntegrationFailure {
        partial: traj,
        error,
    };
    if !(h > 0.0 && h.is_finite()) {
        return Err(fail(traj, IntegrateError::InvalidStep(h)));
    }
    if steps == 0 {
        return Err(fail(traj, IntegrateError::ZeroSteps));
    }
    if x0.len() != l.dim() {
        let error = IntegrateError::StateLength {
            got: x0.len(),
            expected: l.dim(),
        };
        return Err(fail(traj, error));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(fail(traj, IntegrateError::NonFiniteState { step: 0 }));
    }

    let field = SemisprayField::new(l, k);
    let dynamics_err = |step: usize| move |source: DynamicsError| IntegrateError::Dynamics { step, source };
    let lagrangian_err =
        |step: usize| move |e: LagrangianError| IntegrateError::Dynamics { step, source: e.into() };

    let mut x = x0.to_vec();
    // velocity at the current state doubles as the first RK4 stage
    let mut v = match field.velocity(&x) {
        Ok(v) => v,
        Err(e) => return Err(fail(traj, dynamics_err(0)(e))),
    };
    match diagnostics(l, k, &x, &v) {
        Ok((e, r)) => traj.push(0.0, x.clone(), e, r),
        Err(e) => return Err(fail(traj, lagrangian_err(0)(e))),
    }

    for step in 1..=steps {
        let stages = (|| {
            let k1 = &v;
            let k2 = field.velocity(&stage(&x, k1, 0.5 * h))?;
            let k3 = field.velocity(&stage(&x, &k2, 0.5 * h))?;
            let k4 = field.velocity(&stage(&x, &k3, h))?;
            Ok::<_, DynamicsError>((k2, k3, k4))
        })();
        let (k2, k3, k4) = match stages {
            Ok(s) => s,
            Err(e) => return Err(fail(traj, dynamics_err(step)(e))),
        };
        let next: Vec<f64> = (0..x.len())
            .map(|i| x[i] + h / 6.0 * (v[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect();
        if next.iter().any(|c| !c.is_finite()) {
            return Err(fail(traj, IntegrateError::NonFiniteState { step }));
        }
        x = next;
        v = match field.velocity(&x) {
            Ok(v) => v,
            Err(e) => return Err(fail(traj, dynamics_err(step)(e))),
        };
        match diagnostics(l, k, &x, &v) {
            Ok((e, r)) => traj.push(step as f64 * h, x.clone(), e, r),
            Err(e) => return Err(fail(traj, lagrangian_err(step)(e))),
        }
    }
    Ok(traj)
}

/// `max_i |E_i - E_0| / (1 + |E_0|)`; zero for an empty trajectory.
pub fn energy_drift(t: &Trajectory) -> f64 {
    let Some(&e0) = t.energies.first() else {
        return 0.0;
    };
    t.energies
        .iter()
        .map(|e| (e - e0).abs())
        .fold(0.0, f64::max)
        / (1.0 + e0.abs())
}
