//! Pointwise metric geometry: inverse metric, Christoffel symbols, the
//! Riemann tensor and its covariant derivatives, and the `⋆` and `·`
//! products on curvature-type tensors.
//!
//! Sign convention: `R_{abcd} = g_{ae} R^e_{bcd}` with
//! `R^a_{bcd} = ∂_c Γ^a_{db} - ∂_d Γ^a_{cb} + Γ^a_{ce} Γ^e_{db} - Γ^a_{de} Γ^e_{cb}`,
//! which satisfies `A_{c;ba} - A_{c;ab} = R_{abc}^d A_d` and gives the unit
//! sphere `R_{θφθφ} = +sin²θ`.

mod geometry;
mod metric;
mod value;

pub use geometry::{values, Geometry};
pub(crate) use geometry::{flat, unflat};
pub use metric::MetricSpec;
pub use value::{TensorValue, Variance};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{Mode, Scalar};

/// Evaluation knobs shared by the pointwise operations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub mode: Mode,
    /// Relative tolerance for float-mode zero tests.
    pub tol: f64,
    /// Maximum covariant-derivative order; `None` means `n(n+1)/2 + 2`.
    pub order_cap: Option<usize>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            mode: Mode::Exact,
            tol: 1e-9,
            order_cap: None,
        }
    }
}

impl EvalOptions {
    pub fn float() -> Self {
        EvalOptions {
            mode: Mode::Float,
            ..Default::default()
        }
    }

    pub fn order_cap(&self, n: usize) -> usize {
        self.order_cap.unwrap_or(n * (n + 1) / 2 + 2)
    }
}

/// Christoffel symbols `Γ^a_{bc}` at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct ChristoffelValue {
    dim: usize,
    data: Vec<Scalar>,
    /// Largest entry of `∇g` built from these symbols.
    pub metricity_residual: f64,
}

impl ChristoffelValue {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> &Scalar {
        &self.data[(a * self.dim + b) * self.dim + c]
    }

    pub fn data(&self) -> &[Scalar] {
        &self.data
    }
}

fn matrix_tensor(m: &Matrix, variance: Variance) -> TensorValue {
    let n = m.len();
    TensorValue::from_fn(n, vec![variance; 2], |i| m[i[0]][i[1]].clone())
}

pub fn tensor_to_matrix(t: &TensorValue) -> Matrix {
    let n = t.dim();
    (0..n).map(|i| (0..n).map(|j| t.get(&[i, j]).clone()).collect()).collect()
}

pub fn metric_tensor(m: &MetricSpec, x: &[Scalar], opts: &EvalOptions) -> Result<TensorValue> {
    let (g, _, _) = m.at_point(x, opts.mode, opts.tol)?;
    Ok(matrix_tensor(&g, Variance::Co))
}

pub fn inverse_metric(m: &MetricSpec, x: &[Scalar], opts: &EvalOptions) -> Result<TensorValue> {
    let (_, ginv, _) = m.at_point(x, opts.mode, opts.tol)?;
    Ok(matrix_tensor(&ginv, Variance::Contra))
}

pub fn christoffel(m: &MetricSpec, x: &[Scalar], opts: &EvalOptions) -> Result<ChristoffelValue> {
    m.at_point(x, opts.mode, opts.tol)?;
    let geo = Geometry::new(m, x, opts.mode, 2)?;
    let n = geo.dim();
    let data = values(geo.christoffel_jets());
    let g = geo.metric_jets();
    let mut residual: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut r = g[a * n + b].derivative(c).value().clone();
                for d in 0..n {
                    r = &r - &(&data[(d * n + c) * n + a] * g[d * n + b].value());
                    r = &r - &(&data[(d * n + c) * n + b] * g[a * n + d].value());
                }
                residual = residual.max(r.to_f64().abs());
            }
        }
    }
    Ok(ChristoffelValue {
        dim: n,
        data,
        metricity_residual: residual,
    })
}

/// `R_{abcd}` and its covariant derivatives `R_{abcd;s}`, `R_{abcd;st}`, ...
/// up to `derivative_order`.
pub fn riemann(m: &MetricSpec, x: &[Scalar], derivative_order: usize, opts: &EvalOptions) -> Result<Vec<TensorValue>> {
    let cap = opts.order_cap(m.dim());
    if derivative_order > cap {
        return Err(Error::OrderCapExceeded {
            requested: derivative_order,
            cap,
        });
    }
    m.at_point(x, opts.mode, opts.tol)?;
    let geo = Geometry::new(m, x, opts.mode, derivative_order + 2)?;
    let n = geo.dim();
    geo.riemann_derivatives(derivative_order)?
        .into_iter()
        .enumerate()
        .map(|(k, jets)| TensorValue::from_data(n, vec![Variance::Co; 4 + k], values(&jets)))
        .collect()
}

/// Canonical constant-curvature form `C_{abcd} = g_{ac} g_{bd} - g_{ad} g_{bc}`.
pub fn canonical_form(g: &TensorValue) -> TensorValue {
    let n = g.dim();
    TensorValue::from_fn(n, vec![Variance::Co; 4], |i| {
        &(g.get(&[i[0], i[2]]) * g.get(&[i[1], i[3]])) - &(g.get(&[i[0], i[3]]) * g.get(&[i[1], i[2]]))
    })
}

/// Best constant `κ` with `R ≈ κ C`: the full contraction
/// `g^{ac} g^{bd} R_{abcd} / (n(n-1))`.
pub fn curvature_constant(r: &TensorValue, ginv: &TensorValue) -> Result<Scalar> {
    let n = r.dim();
    let mut s = Scalar::zero();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let w = &(ginv.get(&[a, c]) * ginv.get(&[b, d])) * r.get(&[a, b, c, d]);
                    s = &s + &w;
                }
            }
        }
    }
    s.checked_div(&Scalar::int((n * (n - 1)) as i64))
}

/// Gaussian curvature of a surface, `c = R_{1212} / det g`; the unit sphere
/// gives `+1`.
pub fn gaussian_curvature(m: &MetricSpec, x: &[Scalar], opts: &EvalOptions) -> Result<Scalar> {
    if m.dim() != 2 {
        return Err(Error::WrongDimension {
            expected: 2,
            found: m.dim(),
        });
    }
    let (_, _, det) = m.at_point(x, opts.mode, opts.tol)?;
    let r = riemann(m, x, 0, opts)?;
    r[0].get(&[0, 1, 0, 1]).checked_div(&det)
}

/// `(B⋆T)_{abcd…} = B_{sbcd} T^s_{a…} + B_{ascd} T^s_{b…} + B_{absd} T^s_{c…} + B_{abcs} T^s_{d…}`,
/// with the first index of `T` raised by `metric`.
pub fn star(b: &TensorValue, t: &TensorValue, metric: &TensorValue) -> Result<TensorValue> {
    let n = b.dim();
    if b.rank() != 4 || !b.is_covariant() {
        return Err(Error::ShapeMismatch("B must be a covariant 4-tensor".into()));
    }
    if t.rank() < 2 || !t.is_covariant() {
        return Err(Error::ShapeMismatch("T must be covariant with at least 2 indices".into()));
    }
    if metric.rank() != 2 || t.dim() != n || metric.dim() != n {
        return Err(Error::ShapeMismatch("dimensions of B, T and the metric differ".into()));
    }
    let ginv = match metric.variance() {
        [Variance::Contra, Variance::Contra] => tensor_to_matrix(metric),
        _ => crate::linalg::invert(&tensor_to_matrix(metric), 1e-14)?.0,
    };
    let t_up = t.transform_slot(0, &ginv, Variance::Contra);
    star_raised(b, &t_up)
}

/// `⋆` with the first index of `T` already raised.
pub fn star_raised(b: &TensorValue, t_up: &TensorValue) -> Result<TensorValue> {
    let n = b.dim();
    let rest = t_up.rank() - 2;
    let mut out = TensorValue::covariant(n, 4 + rest);
    let len = n.pow((4 + rest) as u32);
    let mut bi = [0usize; 4];
    let mut ti = vec![0usize; t_up.rank()];
    for k in 0..len {
        let idx = unflat(k, n, 4 + rest);
        let mut acc = Scalar::zero();
        for slot in 0..4 {
            ti[1] = idx[slot];
            ti[2..].copy_from_slice(&idx[4..]);
            bi.copy_from_slice(&idx[..4]);
            for s in 0..n {
                bi[slot] = s;
                ti[0] = s;
                let bv = b.get(&bi);
                if bv.is_zero() {
                    continue;
                }
                let tv = t_up.get(&ti);
                if tv.is_zero() {
                    continue;
                }
                acc = &acc + &(bv * tv);
            }
        }
        out.set(&idx, acc);
    }
    Ok(out)
}

/// `(R·T)_{abc…} = R_{abc}^s T_{s…}`; the last index of `R` must be
/// contravariant and the first of `T` covariant.
pub fn dot(r: &TensorValue, t: &TensorValue) -> Result<TensorValue> {
    let n = r.dim();
    if t.dim() != n || r.rank() == 0 || t.rank() == 0 {
        return Err(Error::ShapeMismatch("dot needs two tensors of the same dimension".into()));
    }
    if r.variance()[r.rank() - 1] != Variance::Contra || t.variance()[0] != Variance::Co {
        return Err(Error::ShapeMismatch(
            "dot contracts a contravariant last index of R with a covariant first index of T".into(),
        ));
    }
    let mut variance = r.variance()[..r.rank() - 1].to_vec();
    variance.extend_from_slice(&t.variance()[1..]);
    let rr = r.rank() - 1;
    Ok(TensorValue::from_fn(n, variance, |idx| {
        let mut ri = idx[..rr].to_vec();
        ri.push(0);
        let mut ti = vec![0];
        ti.extend_from_slice(&idx[rr..]);
        (0..n)
            .map(|s| {
                ri[rr] = s;
                ti[0] = s;
                r.get(&ri) * t.get(&ti)
            })
            .sum()
    }))
}

/// Raises the last index of a covariant tensor with `g^{-1}`.
pub fn raise_last(t: &TensorValue, ginv: &TensorValue) -> TensorValue {
    t.transform_slot(t.rank() - 1, &tensor_to_matrix(ginv), Variance::Contra)
}

#[cfg(test)]
mod tests;
