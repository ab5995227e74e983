use super::Expr;

/// `∂e/∂x_a`, built with the folding constructors.
pub fn differentiate(e: &Expr, a: usize) -> Expr {
    match e {
        Expr::Const(_) => Expr::Const(0.0),
        Expr::Var(i) => Expr::Const(if *i == a { 1.0 } else { 0.0 }),
        Expr::Add(u, v) => differentiate(u, a) + differentiate(v, a),
        Expr::Sub(u, v) => differentiate(u, a) - differentiate(v, a),
        Expr::Mul(u, v) => {
            let du = differentiate(u, a);
            let dv = differentiate(v, a);
            du * (**v).clone() + (**u).clone() * dv
        }
        Expr::Div(u, v) => {
            let du = differentiate(u, a);
            let dv = differentiate(v, a);
            if dv.is_zero() {
                return du / (**v).clone();
            }
            (du * (**v).clone() - (**u).clone() * dv) / Expr::powi((**v).clone(), 2)
        }
        Expr::Neg(u) => -differentiate(u, a),
        Expr::Pow(u, k) => {
            let du = differentiate(u, a);
            if du.is_zero() {
                return Expr::Const(0.0);
            }
            Expr::constant(f64::from(*k)) * Expr::powi((**u).clone(), k - 1) * du
        }
        Expr::Sin(u) => Expr::cos((**u).clone()) * differentiate(u, a),
        Expr::Cos(u) => -(Expr::sin((**u).clone()) * differentiate(u, a)),
        Expr::Exp(u) => e.clone() * differentiate(u, a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn square() {
        let d = differentiate(&parse("x0^2", 1).unwrap(), 0);
        assert_eq!(d, Expr::Mul(Box::new(Expr::Const(2.0)), Box::new(Expr::Var(0))));
        assert_eq!(d.to_string(), "2*x0");
    }

    #[test]
    fn quadratic_difference() {
        let d = differentiate(&parse("0.5*x4^2 - 0.5*x0^2", 1).unwrap(), 4);
        let x = [0.3, 0.0, 0.0, 0.0, -1.7, 0.0, 0.0, 0.0];
        assert_eq!(d, Expr::Var(4));
        assert_eq!(d.evaluate(&x), Ok(-1.7));
    }

    #[test]
    fn independent_variable_gives_zero() {
        let e = parse("sin(x1)*exp(x2) + x3^3", 1).unwrap();
        assert_eq!(differentiate(&e, 0), Expr::Const(0.0));
    }

    #[test]
    fn transcendental_rules() {
        let x = [0.4, -0.3, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let cases: [(&str, f64); 4] = [
            ("sin(x0)", 0.4f64.cos()),
            ("cos(x0)", -0.4f64.sin()),
            ("exp(2*x0)", 2.0 * 0.8f64.exp()),
            ("1/x0", -1.0 / 0.16),
        ];
        for (text, want) in cases {
            let d = differentiate(&parse(text, 1).unwrap(), 0);
            let got = d.evaluate(&x).unwrap();
            assert!((got - want).abs() < 1e-14, "{text}: {got} vs {want}");
        }
    }

    #[test]
    fn negative_power() {
        let d = differentiate(&parse("x1^(-2)", 1).unwrap(), 1);
        let x = [0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        assert_eq!(d.evaluate(&x), Ok(-2.0 / 8.0));
    }
}
