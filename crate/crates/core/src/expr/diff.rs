use super::ast::{Chart, Expr, Func, Node};
use crate::error::{Error, Result};

/// Symbolic partial derivative with respect to the coordinate `var`.
pub fn differentiate(e: &Expr, var: &str, chart: &Chart) -> Result<Expr> {
    let index = chart.index_of(var).ok_or_else(|| Error::UnknownVariable {
        name: var.to_string(),
        position: 0,
    })?;
    Ok(derivative(e, index))
}

/// Symbolic partial derivative with respect to the coordinate with index `var`.
pub fn derivative(e: &Expr, var: usize) -> Expr {
    match e.node() {
        Node::Const(_) => Expr::zero(),
        Node::Var(i) => {
            if *i == var {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Node::Add(a, b) => Expr::add(derivative(a, var), derivative(b, var)),
        Node::Sub(a, b) => Expr::sub(derivative(a, var), derivative(b, var)),
        Node::Neg(a) => Expr::neg(derivative(a, var)),
        Node::Mul(a, b) => Expr::add(
            Expr::mul(derivative(a, var), b.clone()),
            Expr::mul(a.clone(), derivative(b, var)),
        ),
        Node::Div(a, b) => Expr::div(
            Expr::sub(
                Expr::mul(derivative(a, var), b.clone()),
                Expr::mul(a.clone(), derivative(b, var)),
            ),
            Expr::pow(b.clone(), 2),
        ),
        Node::Pow(a, k) => Expr::mul(
            Expr::mul(Expr::int(*k as i64), Expr::pow(a.clone(), k - 1)),
            derivative(a, var),
        ),
        Node::Call(f, a) => {
            let da = derivative(a, var);
            let outer = match f {
                Func::Sin => Expr::call(Func::Cos, a.clone()),
                Func::Cos => Expr::neg(Expr::call(Func::Sin, a.clone())),
                Func::Exp => Expr::call(Func::Exp, a.clone()),
                Func::Log => return Expr::div(da, a.clone()),
                Func::Sqrt => {
                    return Expr::div(da, Expr::mul(Expr::int(2), Expr::call(Func::Sqrt, a.clone())))
                }
            };
            Expr::mul(outer, da)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn derivative_of_sin_is_cos() {
        let c = Chart::new(["x1", "x2"]);
        let e = parse("sin(x1)", &c).unwrap();
        assert_eq!(differentiate(&e, "x1", &c).unwrap(), parse("cos(x1)", &c).unwrap());
    }

    #[test]
    fn independent_variable_gives_zero() {
        let c = Chart::new(["x1", "x2"]);
        let e = parse("x2", &c).unwrap();
        assert_eq!(differentiate(&e, "x1", &c).unwrap(), Expr::zero());
    }

    #[test]
    fn unknown_variable() {
        let c = Chart::new(["x1"]);
        assert!(differentiate(&Expr::var(0), "y", &c).is_err());
    }
}
