//! Cartan-type operators attached to a structure `J`: the vertical
//! differential `d_J L`, the closed 2-form `Φ_L = -d d_J L`, the Liouville
//! field `V_J = J ξ`, the energy `E_L = V_J(L) - L` and its differential.
//!
//! Conventions: `dx_a ∧ dx_b (X, Y) = X_a Y_b - X_b Y_a`, and a 2-form is
//! stored as the antisymmetric coefficient array `A` with
//! `Φ = Σ_{a,b} A_ab dx_a ∧ dx_b`, so `Φ(X, Y) = 2 Xᵀ A Y`.

use crate::expr::{Expr, Lagrangian, LagrangianError};
use crate::linalg::Matrix;
use crate::structures::{SignedBlockPermutation, StructureError, StructureId};

/// A 1-form `Σ_a c_a dx_a` with symbolic coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct OneForm {
    coeffs: Vec<Expr>,
}

impl OneForm {
    pub fn coeffs(&self) -> &[Expr] {
        &self.coeffs
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>, LagrangianError> {
        if x.len() != self.coeffs.len() {
            return Err(LagrangianError::StateLength {
                got: x.len(),
                expected: self.coeffs.len(),
            });
        }
        self.coeffs
            .iter()
            .map(|c| c.evaluate(x).map_err(LagrangianError::from))
            .collect()
    }
}

/// `d_J L = i_J dL`: coefficient `a` is `s(a) · ∂L/∂x_{σ(a)}`, i.e. `Jᵀ ∇L`.
pub fn vertical_differential(l: &Lagrangian, k: StructureId) -> OneForm {
    let j = SignedBlockPermutation::builtin(k);
    let n = l.n();
    let coeffs = (0..l.dim())
        .map(|a| {
            let (sigma, s) = j.coordinate_image(a, n);
            let g = l.gradient_expr(sigma).clone();
            if s > 0.0 {
                g
            } else {
                -g
            }
        })
        .collect();
    OneForm { coeffs }
}

/// `i_J ω` for a 1-form given by its coefficient vector: `(i_J ω)(X) = ω(JX)`.
pub fn vertical_derivation_one(
    j: &SignedBlockPermutation,
    omega: &[f64],
) -> Result<Vec<f64>, StructureError> {
    j.apply_transpose(omega)
}

/// `i_J Φ` for a 2-form coefficient array: `(i_J Φ)(X, Y) = Φ(JX, Y) + Φ(X, JY)`.
pub fn vertical_derivation_two(j: &SignedBlockPermutation, coeffs: &Matrix) -> Matrix {
    let n = coeffs.dim() / crate::structures::BLOCKS;
    let jd = j.to_dense(n);
    let jt = jd.transpose();
    let mut out = jt.mul(coeffs);
    let right = coeffs.mul(&jd);
    for r in 0..out.dim() {
        for c in 0..out.dim() {
            out[(r, c)] += right[(r, c)];
        }
    }
    out
}

/// The closed 2-form `Φ_L^J = -d d_J L` as a state-dependent field.
#[derive(Debug, Clone, Copy)]
pub struct TwoFormField<'a> {
    lagrangian: &'a Lagrangian,
    structure: SignedBlockPermutation,
}

impl<'a> TwoFormField<'a> {
    pub fn structure(&self) -> &SignedBlockPermutation {
        &self.structure
    }

    /// `M_jc = -∂(d_J L)_c/∂x_j = -(H J)_jc`, the literal coefficient of
    /// `dx_j ∧ dx_c` produced by differentiating `d_J L`. Not antisymmetric.
    pub fn raw_coefficients(&self, x: &[f64]) -> Result<Matrix, LagrangianError> {
        let h = self.lagrangian.hessian(x)?;
        Ok(negated_h_times_j(&h, &self.structure, self.lagrangian.n()))
    }

    /// Antisymmetric coefficients `A = -½ (H J + J H)`.
    pub fn coefficients(&self, x: &[f64]) -> Result<Matrix, LagrangianError> {
        let h = self.lagrangian.hessian(x)?;
        Ok(antisymmetric_coefficients(&h, &self.structure, self.lagrangian.n()))
    }

    /// `Φ(X, Y) = 2 Xᵀ A Y`.
    pub fn value(&self, x: &[f64], u: &[f64], w: &[f64]) -> Result<f64, LagrangianError> {
        Ok(2.0 * self.coefficients(x)?.bilinear(u, w))
    }

    /// Coefficients of the 1-form `i_v Φ = Φ(v, ·)`, i.e. `2 Aᵀ v`.
    pub fn contract(&self, x: &[f64], v: &[f64]) -> Result<Vec<f64>, LagrangianError> {
        let a = self.coefficients(x)?;
        Ok(a.transpose_mul_vec(v).into_iter().map(|c| 2.0 * c).collect())
    }
}

fn negated_h_times_j(h: &Matrix, j: &SignedBlockPermutation, n: usize) -> Matrix {
    // (H J)_rc = s(c) H_{r σ(c)}
    let dim = h.dim();
    let mut m = Matrix::zeros(dim);
    for c in 0..dim {
        let (sigma, s) = j.coordinate_image(c, n);
        for r in 0..dim {
            m[(r, c)] = -s * h[(r, sigma)];
        }
    }
    m
}

pub(crate) fn antisymmetric_coefficients(h: &Matrix, j: &SignedBlockPermutation, n: usize) -> Matrix {
    let m = negated_h_times_j(h, j, n);
    let dim = h.dim();
    let mut a = Matrix::zeros(dim);
    for r in 0..dim {
        for c in 0..dim {
            a[(r, c)] = 0.5 * (m[(r, c)] - m[(c, r)]);
        }
    }
    a
}

pub fn kaehler_form(l: &Lagrangian, k: StructureId) -> TwoFormField<'_> {
    TwoFormField {
        lagrangian: l,
        structure: SignedBlockPermutation::builtin(k),
    }
}

/// `V_J = J ξ` for the semispray with components `v`.
pub fn liouville_field(k: StructureId, v: &[f64]) -> Result<Vec<f64>, StructureError> {
    SignedBlockPermutation::builtin(k).apply(v)
}

/// `E_L = (J v) · ∇L(x) - L(x)`.
pub fn energy(l: &Lagrangian, k: StructureId, x: &[f64], v: &[f64]) -> Result<f64, LagrangianError> {
    let grad = l.gradient(x)?;
    let jv = liouville_field(k, v).map_err(|_| LagrangianError::StateLength {
        got: v.len(),
        expected: l.dim(),
    })?;
    if jv.len() != grad.len() {
        return Err(LagrangianError::StateLength {
            got: v.len(),
            expected: l.dim(),
        });
    }
    let vl: f64 = jv.iter().zip(&grad).map(|(a, b)| a * b).sum();
    let e = vl - l.value(x)?;
    if e.is_finite() {
        Ok(e)
    } else {
        Err(crate::expr::EvalError::NonFinite.into())
    }
}

/// `dE_L` at fixed velocity coefficients `v`.
#[derive(Debug, Clone)]
pub struct EnergyDifferential<'a> {
    lagrangian: &'a Lagrangian,
    jv: Vec<f64>,
}

impl EnergyDifferential<'_> {
    /// Coefficient `a`: `Σ_b (J v)_b H_ba(x) - ∂L/∂x_a(x)`.
    pub fn at(&self, x: &[f64]) -> Result<Vec<f64>, LagrangianError> {
        let h = self.lagrangian.hessian(x)?;
        let grad = self.lagrangian.gradient(x)?;
        let hjv = h.transpose_mul_vec(&self.jv);
        Ok(hjv.into_iter().zip(grad).map(|(a, g)| a - g).collect())
    }
}

pub fn energy_differential<'a>(
    l: &'a Lagrangian,
    k: StructureId,
    v: &[f64],
) -> Result<EnergyDifferential<'a>, LagrangianError> {
    let jv = liouville_field(k, v)
        .ok()
        .filter(|jv| jv.len() == l.dim())
        .ok_or(LagrangianError::StateLength {
            got: v.len(),
            expected: l.dim(),
        })?;
    Ok(EnergyDifferential { lagrangian: l, jv })
}
