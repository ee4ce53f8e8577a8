use num_rational::BigRational;

use super::ast::{Expr, Func, Node};
use crate::error::{Error, Result};
use crate::scalar::{Mode, Scalar};

/// Target algebra for expression evaluation.
///
/// Point evaluation uses [`Scalar`]; the tensor pipeline evaluates into
/// truncated Taylor series with the same walker.
pub trait EvalDomain {
    type Value: Clone;

    fn constant(&self, c: &BigRational) -> Self::Value;
    fn variable(&self, index: usize) -> Self::Value;
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn sub(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn neg(&self, a: &Self::Value) -> Self::Value;
    fn div(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value>;
    fn powi(&self, a: &Self::Value, k: i32) -> Result<Self::Value>;
    fn apply(&self, f: Func, a: &Self::Value) -> Result<Self::Value>;
}

pub fn evaluate_in<D: EvalDomain>(domain: &D, e: &Expr) -> Result<D::Value> {
    Ok(match e.node() {
        Node::Const(c) => domain.constant(c),
        Node::Var(i) => domain.variable(*i),
        Node::Add(a, b) => domain.add(&evaluate_in(domain, a)?, &evaluate_in(domain, b)?),
        Node::Sub(a, b) => domain.sub(&evaluate_in(domain, a)?, &evaluate_in(domain, b)?),
        Node::Mul(a, b) => domain.mul(&evaluate_in(domain, a)?, &evaluate_in(domain, b)?),
        Node::Div(a, b) => domain.div(&evaluate_in(domain, a)?, &evaluate_in(domain, b)?)?,
        Node::Neg(a) => domain.neg(&evaluate_in(domain, a)?),
        Node::Pow(a, k) => domain.powi(&evaluate_in(domain, a)?, *k)?,
        Node::Call(f, a) => domain.apply(*f, &evaluate_in(domain, a)?)?,
    })
}

struct PointDomain<'p> {
    point: &'p [Scalar],
    mode: Mode,
}

impl EvalDomain for PointDomain<'_> {
    type Value = Scalar;

    fn constant(&self, c: &BigRational) -> Scalar {
        Scalar::Exact(c.clone()).in_mode(self.mode)
    }

    fn variable(&self, index: usize) -> Scalar {
        self.point[index].in_mode(self.mode)
    }

    fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        a + b
    }

    fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        a - b
    }

    fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        a * b
    }

    fn neg(&self, a: &Scalar) -> Scalar {
        -a
    }

    fn div(&self, a: &Scalar, b: &Scalar) -> Result<Scalar> {
        a.checked_div(b)
    }

    fn powi(&self, a: &Scalar, k: i32) -> Result<Scalar> {
        a.powi(k)
    }

    fn apply(&self, f: Func, a: &Scalar) -> Result<Scalar> {
        match f {
            Func::Sin => Ok(a.sin()),
            Func::Cos => Ok(a.cos()),
            Func::Exp => Ok(a.exp()),
            Func::Log => a.ln(),
            Func::Sqrt => a.sqrt(),
        }
    }
}

/// Evaluates `e` at `point`. In exact mode rational subexpressions stay
/// rational; irrational primitives at nonzero arguments return floats.
pub fn evaluate(e: &Expr, point: &[Scalar], mode: Mode) -> Result<Scalar> {
    if let Some(v) = e.max_var() {
        if v >= point.len() {
            return Err(Error::ShapeMismatch(format!(
                "expression uses coordinate {} but the point has {} entries",
                v + 1,
                point.len()
            )));
        }
    }
    evaluate_in(&PointDomain { point, mode }, e)
}

/// Float evaluation at an `f64` point.
pub fn evaluate_f64(e: &Expr, point: &[f64]) -> Result<f64> {
    let p: Vec<Scalar> = point.iter().map(|&v| Scalar::float(v)).collect();
    Ok(evaluate(e, &p, Mode::Float)?.to_f64())
}
