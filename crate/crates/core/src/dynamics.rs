//! Euler-Lagrange systems and the semispray they determine.
//!
//! For structure `J` with block action `b ↦ (s_b, σ(b))` the equations are
//!
//! ```text
//! d/dt(∂L/∂x_(b,i)) + s_b ∂L/∂x_(σ(b),i) = 0,      b = 0..7
//! ```
//!
//! Expanding `d/dt(∂L/∂x_a) = Σ_b H_ab ẋ_b` turns them into the linear system
//! `H(x) v = J ∇L(x)` for the semispray components `v = ẋ`.

use std::fmt;

use thiserror::Error;

use crate::calculus::{energy_differential, kaehler_form};
use crate::expr::{Lagrangian, LagrangianError};
use crate::linalg::{LinalgError, LuFactorization};
use crate::structures::{SignedBlockPermutation, StructureId, BLOCKS};

/// Condition estimates above this make the Lagrangian degenerate at a state.
pub const DEGENERACY_CONDITION: f64 = 1e12;
/// Condition estimates above this are reported as near-degenerate.
pub const WARN_CONDITION: f64 = 1e8;
/// Hessian pivots smaller than this in magnitude are reported as near-degenerate.
pub const WARN_PIVOT: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("degenerate Lagrangian: singular Hessian (zero pivot in column {column})")]
    SingularHessian { column: usize },
    #[error("degenerate Lagrangian: Hessian condition estimate {condition:e} exceeds {DEGENERACY_CONDITION:e}")]
    IllConditioned { condition: f64 },
    #[error(transparent)]
    Lagrangian(#[from] LagrangianError),
}

impl DynamicsError {
    /// True for both flavours of a non-regular Lagrangian.
    pub fn is_degenerate(&self) -> bool {
        matches!(
            self,
            DynamicsError::SingularHessian { .. } | DynamicsError::IllConditioned { .. }
        )
    }
}

/// One equation `d/dt(∂L/∂x_block) + sign · ∂L/∂x_paired = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ElEquation {
    pub block: usize,
    pub paired_block: usize,
    pub sign: i8,
}

/// Symbolic name of coordinate `x_(block, i)`.
pub fn block_label(block: usize) -> String {
    match block {
        0 => "x_i".to_string(),
        1 => "x_{n+i}".to_string(),
        b => format!("x_{{{b}n+i}}"),
    }
}

impl fmt::Display for ElEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = if self.sign > 0 { '+' } else { '-' };
        write!(
            f,
            "d/dt(dL/d{}) {op} dL/d{} = 0",
            block_label(self.block),
            block_label(self.paired_block)
        )
    }
}

/// The eight Euler-Lagrange equations for one structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElSystem {
    structure: StructureId,
    equations: [ElEquation; BLOCKS],
}

impl ElSystem {
    pub fn structure(&self) -> StructureId {
        self.structure
    }

    pub fn equations(&self) -> &[ElEquation; BLOCKS] {
        &self.equations
    }

    /// Per-coordinate pairing `(σ(a), s(a))` for block size `n`.
    pub fn coordinate_pairing(&self, n: usize) -> Vec<(usize, i8)> {
        (0..BLOCKS * n)
            .map(|a| {
                let eq = &self.equations[a / n];
                (eq.paired_block * n + a % n, eq.sign)
            })
            .collect()
    }

    /// One equation per line, blocks in order.
    pub fn render(&self) -> String {
        self.equations.iter().map(|eq| format!("{eq}\n")).collect()
    }
}

pub fn derive_el_system(k: StructureId) -> ElSystem {
    let j = SignedBlockPermutation::builtin(k);
    let equations = std::array::from_fn(|b| {
        let (sign, paired_block) = j.act_on_block(b);
        ElEquation {
            block: b,
            paired_block,
            sign,
        }
    });
    ElSystem {
        structure: k,
        equations,
    }
}

/// Result of one semispray solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SemisprayVelocity {
    pub velocity: Vec<f64>,
    /// `‖H‖₁ ‖H⁻¹‖₁`.
    pub condition: f64,
    pub min_pivot: f64,
}

impl SemisprayVelocity {
    pub fn near_degenerate(&self) -> bool {
        self.condition > WARN_CONDITION || self.min_pivot < WARN_PIVOT
    }
}

/// `x ↦ v(x)` solving `H(x) v = J ∇L(x)`.
#[derive(Debug, Clone, Copy)]
pub struct SemisprayField<'a> {
    lagrangian: &'a Lagrangian,
    structure: StructureId,
    j: SignedBlockPermutation,
}

impl<'a> SemisprayField<'a> {
    pub fn new(lagrangian: &'a Lagrangian, structure: StructureId) -> Self {
        Self {
            lagrangian,
            structure,
            j: SignedBlockPermutation::builtin(structure),
        }
    }

    pub fn lagrangian(&self) -> &'a Lagrangian {
        self.lagrangian
    }

    pub fn structure(&self) -> StructureId {
        self.structure
    }

    pub fn solve(&self, x: &[f64]) -> Result<SemisprayVelocity, DynamicsError> {
        let h = self.lagrangian.hessian(x)?;
        let grad = self.lagrangian.gradient(x)?;
        let lu = LuFactorization::new(&h).map_err(|e| match e {
            LinalgError::Singular { column } => DynamicsError::SingularHessian { column },
            LinalgError::NonFinite => DynamicsError::Lagrangian(LagrangianError::Eval(
                crate::expr::EvalError::NonFinite,
            )),
        })?;
        let condition = lu.condition_estimate();
        if condition.is_nan() || condition > DEGENERACY_CONDITION {
            return Err(DynamicsError::IllConditioned { condition });
        }
        let mut rhs = vec![0.0; grad.len()];
        self.j.apply_into(&grad, self.lagrangian.n(), &mut rhs);
        Ok(SemisprayVelocity {
            velocity: lu.solve(&rhs),
            condition,
            min_pivot: lu.min_pivot(),
        })
    }

    pub fn velocity(&self, x: &[f64]) -> Result<Vec<f64>, DynamicsError> {
        self.solve(x).map(|s| s.velocity)
    }
}

pub fn solve_semispray(l: &Lagrangian, k: StructureId, x: &[f64]) -> Result<Vec<f64>, DynamicsError> {
    SemisprayField::new(l, k).velocity(x)
}

/// `r_a = Σ_b H_ab v_b + s(a) ∂L/∂x_σ(a)`; zero iff `(x, v)` satisfies the
/// Euler-Lagrange system.
pub fn el_residual(
    l: &Lagrangian,
    k: StructureId,
    x: &[f64],
    v: &[f64],
) -> Result<Vec<f64>, LagrangianError> {
    if v.len() != l.dim() {
        return Err(LagrangianError::StateLength {
            got: v.len(),
            expected: l.dim(),
        });
    }
    let h = l.hessian(x)?;
    let grad = l.gradient(x)?;
    let pairing = derive_el_system(k).coordinate_pairing(l.n());
    let hv = h.mul_vec(v);
    Ok(hv
        .into_iter()
        .zip(pairing)
        .map(|(hv_a, (sigma, s))| hv_a + f64::from(s) * grad[sigma])
        .collect())
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `‖i_v Φ_L − dE_L‖` at `(x, v)`, assembled from the unreduced forms.
pub fn dynamics_residual(
    l: &Lagrangian,
    k: StructureId,
    x: &[f64],
    v: &[f64],
) -> Result<f64, LagrangianError> {
    let lhs = kaehler_form(l, k).contract(x, v)?;
    let rhs = energy_differential(l, k, v)?.at(x)?;
    let diff: Vec<f64> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
    Ok(norm(&diff))
}
