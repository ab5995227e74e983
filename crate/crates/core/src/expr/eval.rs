use thiserror::Error;

use super::Expr;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero raised to negative power {0}")]
    ZeroToNegativePower(i32),
    #[error("non-finite intermediate value")]
    NonFinite,
    #[error("variable x{index} is outside the state vector of length {len}")]
    VariableOutOfRange { index: usize, len: usize },
}

fn finite(v: f64) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::NonFinite)
    }
}

impl Expr {
    /// Evaluates in IEEE double precision. Any non-finite intermediate is an
    /// error rather than a silently propagated `inf`/`NaN`.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64, EvalError> {
        match self {
            Expr::Const(c) => finite(*c),
            Expr::Var(i) => x.get(*i).copied().ok_or(EvalError::VariableOutOfRange {
                index: *i,
                len: x.len(),
            }).and_then(finite),
            Expr::Add(a, b) => finite(a.evaluate(x)? + b.evaluate(x)?),
            Expr::Sub(a, b) => finite(a.evaluate(x)? - b.evaluate(x)?),
            Expr::Mul(a, b) => finite(a.evaluate(x)? * b.evaluate(x)?),
            Expr::Div(a, b) => {
                let num = a.evaluate(x)?;
                let den = b.evaluate(x)?;
                if den == 0.0 {
                    return Err(EvalError::DivisionByZero);
                }
                finite(num / den)
            }
            Expr::Neg(a) => Ok(-a.evaluate(x)?),
            Expr::Pow(base, k) => {
                let b = base.evaluate(x)?;
                if b == 0.0 && *k < 0 {
                    return Err(EvalError::ZeroToNegativePower(*k));
                }
                finite(b.powi(*k))
            }
            Expr::Sin(a) => Ok(a.evaluate(x)?.sin()),
            Expr::Cos(a) => Ok(a.evaluate(x)?.cos()),
            Expr::Exp(a) => finite(a.evaluate(x)?.exp()),
        }
    }
}
