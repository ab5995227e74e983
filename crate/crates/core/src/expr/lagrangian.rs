use std::collections::BTreeMap;

use thiserror::Error;

use super::{differentiate, parse, EvalError, Expr, ParseError};
use crate::linalg::Matrix;
use crate::structures::BLOCKS;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LagrangianError {
    #[error("block size n must be positive")]
    ZeroBlockSize,
    #[error("expression uses x{index}, but n = {n} only allows x0..x{max}", max = BLOCKS * n - 1)]
    VariableOutOfRange { index: usize, n: usize },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("state has length {got}, expected {expected}")]
    StateLength { got: usize, expected: usize },
    #[error("unknown Lagrangian template {0:?} (expected \"free\" or \"isotropic\")")]
    UnknownTemplate(String),
    #[error("template {template:?} requires parameter {param:?}")]
    MissingParam { template: String, param: &'static str },
    #[error("template {template:?} does not take parameter {param:?}")]
    UnknownParam { template: String, param: String },
    #[error("parameter {param:?} must be finite, got {value}")]
    InvalidParam { param: String, value: f64 },
}

/// A Lagrangian `L(x)` on `R^{8n}` with its symbolic gradient and Hessian
/// built once at construction.
#[derive(Debug, Clone)]
pub struct Lagrangian {
    n: usize,
    expr: Expr,
    gradient: Vec<Expr>,
    // row-major, dim × dim; entries (a, b) and (b, a) share one derivation
    hessian: Vec<Expr>,
}

impl Lagrangian {
    pub fn new(n: usize, expr: Expr) -> Result<Self, LagrangianError> {
        if n == 0 {
            return Err(LagrangianError::ZeroBlockSize);
        }
        let dim = BLOCKS * n;
        if let Some(index) = expr.max_var().filter(|&i| i >= dim) {
            return Err(LagrangianError::VariableOutOfRange { index, n });
        }
        let gradient: Vec<Expr> = (0..dim).map(|a| differentiate(&expr, a)).collect();
        let mut hessian = vec![Expr::Const(0.0); dim * dim];
        for a in 0..dim {
            if gradient[a].is_zero() {
                continue;
            }
            for b in a..dim {
                let h = differentiate(&gradient[a], b);
                hessian[b * dim + a] = h.clone();
                hessian[a * dim + b] = h;
            }
        }
        Ok(Self {
            n,
            expr,
            gradient,
            hessian,
        })
    }

    pub fn from_text(text: &str, n: usize) -> Result<Self, LagrangianError> {
        if n == 0 {
            return Err(LagrangianError::ZeroBlockSize);
        }
        Self::new(n, parse(text, n)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        BLOCKS * self.n
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn gradient_expr(&self, a: usize) -> &Expr {
        &self.gradient[a]
    }

    pub fn hessian_expr(&self, a: usize, b: usize) -> &Expr {
        &self.hessian[a * self.dim() + b]
    }

    fn check_state(&self, x: &[f64]) -> Result<(), LagrangianError> {
        if x.len() != self.dim() {
            return Err(LagrangianError::StateLength {
                got: x.len(),
                expected: self.dim(),
            });
        }
        Ok(())
    }

    pub fn value(&self, x: &[f64]) -> Result<f64, LagrangianError> {
        self.check_state(x)?;
        Ok(self.expr.evaluate(x)?)
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, LagrangianError> {
        self.check_state(x)?;
        self.gradient
            .iter()
            .map(|g| g.evaluate(x).map_err(LagrangianError::from))
            .collect()
    }

    pub fn hessian(&self, x: &[f64]) -> Result<Matrix, LagrangianError> {
        self.check_state(x)?;
        let dim = self.dim();
        let rows = crate::parallel::map_rows(dim, |r| {
            let mut row = vec![0.0; dim];
            for (c, slot) in row.iter_mut().enumerate().skip(r) {
                *slot = self.hessian[r * dim + c].evaluate(x)?;
            }
            Ok::<_, EvalError>(row)
        })?;
        let mut data = vec![0.0; dim * dim];
        for (r, row) in rows.into_iter().enumerate() {
            for c in r..dim {
                data[r * dim + c] = row[c];
                data[c * dim + r] = row[c];
            }
        }
        Ok(Matrix::from_row_major(dim, data))
    }
}

fn param(
    template: &str,
    params: &BTreeMap<String, f64>,
    key: &'static str,
    default: Option<f64>,
) -> Result<f64, LagrangianError> {
    let value = match (params.get(key), default) {
        (Some(&v), _) => v,
        (None, Some(d)) => d,
        (None, None) => {
            return Err(LagrangianError::MissingParam {
                template: template.to_string(),
                param: key,
            })
        }
    };
    if !value.is_finite() {
        return Err(LagrangianError::InvalidParam {
            param: key.to_string(),
            value,
        });
    }
    Ok(value)
}

/// Builtin templates, written in the coordinates themselves:
///
/// * `isotropic`: `L = (m ω² / 2) Σ_a x_a²` over all `8n` coordinates.
/// * `free`: the isotropic form minus the linear potential `m g x_0`.
///
/// Parameters: `m` (default 1), `omega` (default 1); `free` also needs `g`.
pub fn builtin_lagrangian(
    name: &str,
    n: usize,
    params: &BTreeMap<String, f64>,
) -> Result<Lagrangian, LagrangianError> {
    let allowed: &[&str] = match name {
        "isotropic" => &["m", "omega"],
        "free" => &["m", "omega", "g"],
        other => return Err(LagrangianError::UnknownTemplate(other.to_string())),
    };
    if let Some(extra) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(LagrangianError::UnknownParam {
            template: name.to_string(),
            param: extra.clone(),
        });
    }
    if n == 0 {
        return Err(LagrangianError::ZeroBlockSize);
    }
    let m = param(name, params, "m", Some(1.0))?;
    let omega = param(name, params, "omega", Some(1.0))?;

    let squares = (1..BLOCKS * n)
        .map(|a| Expr::powi(Expr::var(a), 2))
        .fold(Expr::powi(Expr::var(0), 2), Expr::add);
    let mut expr = Expr::constant(0.5 * m * omega * omega) * squares;
    if name == "free" {
        let g = param(name, params, "g", None)?;
        expr = expr - Expr::constant(m * g) * Expr::var(0);
    }
    Lagrangian::new(n, expr)
}
