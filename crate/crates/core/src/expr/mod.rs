//! Lagrangian expressions over the flat coordinates `x0 .. x{8n-1}`.
//!
//! The tree is deliberately small: arithmetic, integer powers, `sin`, `cos`
//! and `exp`. The builder functions fold constants and drop `0`/`1`
//! identities; nothing more aggressive is attempted.

mod derivative;
mod eval;
mod lagrangian;
mod parser;

use std::fmt;

pub use derivative::differentiate;
pub use eval::EvalError;
pub use lagrangian::{builtin_lagrangian, Lagrangian, LagrangianError};
pub use parser::{parse, ParseError, ParseErrorKind};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, i32),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
}

// the std::ops impls below delegate to these folding constructors
#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn constant(c: f64) -> Self {
        Expr::Const(c)
    }

    pub fn var(index: usize) -> Self {
        Expr::Var(index)
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    pub fn is_one(&self) -> bool {
        self.as_const() == Some(1.0)
    }

    // Constant folding is skipped whenever the folded value would not be
    // finite, so every `Const` in a tree prints as a parseable literal.
    pub fn add(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if (x + y).is_finite() => Expr::Const(x + y),
            (Some(0.0), _) => b,
            (_, Some(0.0)) => a,
            _ => Expr::Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if (x - y).is_finite() => Expr::Const(x - y),
            (Some(0.0), _) => Expr::neg(b),
            (_, Some(0.0)) => a,
            _ => Expr::Sub(Box::new(a), Box::new(b)),
        }
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if (x * y).is_finite() => Expr::Const(x * y),
            (Some(x), _) | (_, Some(x)) if x == 0.0 => Expr::Const(0.0),
            (Some(1.0), _) => b,
            (_, Some(1.0)) => a,
            (Some(-1.0), _) => Expr::neg(b),
            (_, Some(-1.0)) => Expr::neg(a),
            (Some(x), None) => match b {
                // c1 * (c2 * e) -> (c1 c2) * e
                Expr::Mul(inner, rest)
                    if inner.as_const().is_some_and(|c| (x * c).is_finite()) =>
                {
                    Expr::mul(Expr::Const(x * inner.as_const().unwrap_or(1.0)), *rest)
                }
                b => Expr::Mul(Box::new(a), Box::new(b)),
            },
            _ => Expr::Mul(Box::new(a), Box::new(b)),
        }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if y != 0.0 && (x / y).is_finite() => Expr::Const(x / y),
            (Some(0.0), _) => Expr::Const(0.0),
            (_, Some(1.0)) => a,
            _ => Expr::Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn neg(a: Expr) -> Expr {
        match a {
            Expr::Const(c) => Expr::Const(-c),
            Expr::Neg(inner) => *inner,
            other => Expr::Neg(Box::new(other)),
        }
    }

    pub fn powi(base: Expr, exponent: i32) -> Expr {
        match (base.as_const(), exponent) {
            (_, 0) => Expr::Const(1.0),
            (_, 1) => base,
            (Some(c), k) if (c != 0.0 || k > 0) && c.powi(k).is_finite() => Expr::Const(c.powi(k)),
            _ => Expr::Pow(Box::new(base), exponent),
        }
    }

    pub fn sin(a: Expr) -> Expr {
        match a.as_const() {
            Some(c) => Expr::Const(c.sin()),
            None => Expr::Sin(Box::new(a)),
        }
    }

    pub fn cos(a: Expr) -> Expr {
        match a.as_const() {
            Some(c) => Expr::Const(c.cos()),
            None => Expr::Cos(Box::new(a)),
        }
    }

    pub fn exp(a: Expr) -> Expr {
        match a.as_const() {
            Some(c) if c.exp().is_finite() => Expr::Const(c.exp()),
            Some(_) => Expr::Exp(Box::new(a)),
            None => Expr::Exp(Box::new(a)),
        }
    }

    /// Largest variable index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                match (a.max_var(), b.max_var()) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, y) => x.or(y),
                }
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Sin(a) | Expr::Cos(a) | Expr::Exp(a) => {
                a.max_var()
            }
        }
    }

    /// Node count.
    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) => 1,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                1 + a.size() + b.size()
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Sin(a) | Expr::Cos(a) | Expr::Exp(a) => {
                1 + a.size()
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(c) if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) => 3,
            _ => 5,
        }
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::add(self, rhs)
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::sub(self, rhs)
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::mul(self, rhs)
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::div(self, rhs)
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if e.precedence() < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

// Prints with the minimum parentheses needed for the parser to rebuild the
// same tree. Negative constants print as `-c` and are parenthesized wherever
// a unary minus would be.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                if c.is_finite() {
                    write!(f, "{c}")
                } else {
                    write!(f, "({c})")
                }
            }
            Expr::Var(i) => write!(f, "x{i}"),
            Expr::Add(a, b) => {
                write_operand(f, a, 1)?;
                f.write_str(" + ")?;
                write_operand(f, b, 2)
            }
            Expr::Sub(a, b) => {
                write_operand(f, a, 1)?;
                f.write_str(" - ")?;
                write_operand(f, b, 2)
            }
            Expr::Mul(a, b) => {
                write_operand(f, a, 2)?;
                f.write_str("*")?;
                write_operand(f, b, 3)
            }
            Expr::Div(a, b) => {
                write_operand(f, a, 2)?;
                f.write_str("/")?;
                write_operand(f, b, 4)
            }
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_operand(f, a, 3)
            }
            Expr::Pow(base, k) => {
                write_operand(f, base, 5)?;
                if *k < 0 {
                    write!(f, "^({k})")
                } else {
                    write!(f, "^{k}")
                }
            }
            Expr::Sin(a) => write!(f, "sin({a})"),
            Expr::Cos(a) => write!(f, "cos({a})"),
            Expr::Exp(a) => write!(f, "exp({a})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Expr {
        Expr::var(i)
    }

    #[test]
    fn builders_fold_constants() {
        assert_eq!(Expr::constant(2.0) + Expr::constant(3.0), Expr::Const(5.0));
        assert_eq!(Expr::constant(0.0) * x(1), Expr::Const(0.0));
        assert_eq!(Expr::constant(1.0) * x(1), x(1));
        assert_eq!(x(1) + Expr::constant(0.0), x(1));
        assert_eq!(Expr::constant(0.0) - x(2), Expr::Neg(Box::new(x(2))));
        assert_eq!(-(-x(3)), x(3));
        assert_eq!(Expr::powi(x(0), 1), x(0));
        assert_eq!(Expr::constant(0.5) * (Expr::constant(2.0) * x(4)), x(4));
        assert_eq!(Expr::powi(x(0), 0), Expr::Const(1.0));
        assert_eq!(Expr::powi(Expr::constant(2.0), 3), Expr::Const(8.0));
        // 0^-1 is left unevaluated so that evaluation can report it
        assert!(matches!(Expr::powi(Expr::constant(0.0), -1), Expr::Pow(..)));
        assert!(matches!(Expr::constant(1.0) / Expr::constant(0.0), Expr::Div(..)));
    }

    #[test]
    fn printing_respects_precedence() {
        let e = Expr::Mul(
            Box::new(Expr::Const(0.5)),
            Box::new(Expr::Add(
                Box::new(Expr::Pow(Box::new(x(0)), 2)),
                Box::new(Expr::Pow(Box::new(x(4)), 2)),
            )),
        );
        assert_eq!(e.to_string(), "0.5*(x0^2 + x4^2)");
        let e = Expr::Sub(
            Box::new(x(0)),
            Box::new(Expr::Sub(Box::new(x(1)), Box::new(x(2)))),
        );
        assert_eq!(e.to_string(), "x0 - (x1 - x2)");
        let e = Expr::Pow(Box::new(Expr::Const(-2.0)), -3);
        assert_eq!(e.to_string(), "(-2)^(-3)");
        let e = Expr::Neg(Box::new(Expr::Pow(Box::new(x(1)), 2)));
        assert_eq!(e.to_string(), "-x1^2");
        let e = Expr::Div(Box::new(x(1)), Box::new(Expr::Mul(Box::new(x(2)), Box::new(x(3)))));
        assert_eq!(e.to_string(), "x1/(x2*x3)");
    }

    #[test]
    fn max_var_and_size() {
        let e = Expr::sin(x(3)) * Expr::exp(x(7));
        assert_eq!(e.max_var(), Some(7));
        assert_eq!(e.size(), 5);
        assert_eq!(Expr::constant(1.0).max_var(), None);
    }
}
