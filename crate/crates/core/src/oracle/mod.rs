//! Independent checks of the flag: a truncated Taylor-series solver for
//! the Killing equation and a residual test for explicit vector fields.
//!
//! Both work from the metric components alone through
//! `(L_ξ g)_{ab} = ξ^c ∂_c g_{ab} + g_{cb} ∂_a ξ^c + g_{ac} ∂_b ξ^c`, which
//! vanishes exactly when `K_{a;b} + K_{b;a} = 0` for `K_a = g_{ab} ξ^b`.
//! No Christoffel symbols or curvature are involved.

use serde::Serialize;

use crate::error::{Error, Result, Warning, WarningKind};
use crate::expr::{derivative, evaluate, Expr};
use crate::jet::{Jet, JetDomain};
use crate::linalg;
use crate::num::serialize_scalar;
use crate::scalar::{Mode, Scalar};
use crate::tensor::{EvalOptions, MetricSpec};

/// Exact elimination is used up to this many unknowns.
pub const EXACT_UNKNOWN_LIMIT: usize = 120;

/// Solution space of the truncated Killing equation.
#[derive(Debug, Clone, Serialize)]
pub struct JetSolution {
    pub order: usize,
    pub dimension: usize,
    pub unknowns: usize,
    pub equations: usize,
    pub exact: bool,
    /// Taylor coefficients of `ξ^c` for each solution, indexed
    /// `c * monomials + k` with `k` in graded monomial order.
    #[serde(skip)]
    pub basis: Vec<Vec<Scalar>>,
    pub warnings: Vec<Warning>,
}

/// Default order `n(n+1)/2 + 3`.
pub fn default_order(n: usize) -> usize {
    n * (n + 1) / 2 + 3
}

/// Solves `L_ξ g = 0` for polynomial `ξ` of degree `order` about `x`, as
/// identities in `h` up to degree `order - 1`.
pub fn jet_killing_solve(m: &MetricSpec, x: &[Scalar], order: usize, opts: &EvalOptions) -> Result<JetSolution> {
    if order < 2 {
        return Err(Error::OrderTooLow(order));
    }
    m.at_point(x, opts.mode, opts.tol)?;
    let n = m.dim();
    let dom = JetDomain::new(x, order, opts.mode);
    let basis = dom.basis().clone();
    let mut g: Vec<Jet> = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            g.push(if b < a { g[b * n + a].clone() } else { dom.expand(m.component(a, b))? });
        }
    }
    let dg: Vec<Vec<Jet>> = g.iter().map(|j| (0..n).map(|c| j.derivative(c)).collect()).collect();

    let monomials = basis.size(order);
    let eq_monomials = basis.size(order - 1);
    let unknowns = n * monomials;
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a..n).map(move |b| (a, b))).collect();
    let equations = pairs.len() * eq_monomials;

    // coefficient of h^β in a jet, zero outside its support
    let coeff = |j: &Jet, beta: &[i32]| -> Option<Scalar> {
        if beta.iter().any(|&e| e < 0) {
            return None;
        }
        let exp: Vec<u8> = beta.iter().map(|&e| e as u8).collect();
        let k = basis.index_of(&exp)?;
        j.coeffs().get(k).filter(|s| !s.is_zero()).cloned()
    };

    let mut rows = vec![vec![Scalar::zero(); unknowns]; equations];
    for (p, &(a, b)) in pairs.iter().enumerate() {
        for q in 0..eq_monomials {
            let beta: Vec<i32> = basis.exponent(q).iter().map(|&e| e as i32).collect();
            let row = &mut rows[p * eq_monomials + q];
            for c in 0..n {
                for k in 0..monomials {
                    let alpha: Vec<i32> = basis.exponent(k).iter().map(|&e| e as i32).collect();
                    let mut acc = Scalar::zero();
                    // ξ^c ∂_c g_ab
                    let shift: Vec<i32> = beta.iter().zip(&alpha).map(|(b, a)| b - a).collect();
                    if let Some(v) = coeff(&dg[a * n + b][c], &shift) {
                        acc = &acc + &v;
                    }
                    // g_cb ∂_a ξ^c + g_ac ∂_b ξ^c
                    for (d, gj) in [(a, &g[c * n + b]), (b, &g[a * n + c])] {
                        if alpha[d] == 0 {
                            continue;
                        }
                        let mut s = shift.clone();
                        s[d] += 1;
                        if let Some(v) = coeff(gj, &s) {
                            acc = &acc + &(&v * &Scalar::int(alpha[d] as i64));
                        }
                    }
                    row[c * monomials + k] = acc;
                }
            }
        }
    }

    let mut warnings = Vec::new();
    let exact_input = linalg::all_exact(&rows);
    if exact_input && unknowns > EXACT_UNKNOWN_LIMIT {
        warnings.push(Warning::new(
            WarningKind::FloatFallback,
            "oracle",
            format!("{unknowns} unknowns exceed the exact limit {EXACT_UNKNOWN_LIMIT}; using floating point"),
        ));
        for r in rows.iter_mut() {
            for v in r.iter_mut() {
                *v = v.to_float();
            }
        }
    }
    if !linalg::all_exact(&rows) {
        normalize_columns(&mut rows, unknowns);
    }
    let ker = linalg::kernel(&rows, unknowns, opts.tol);
    Ok(JetSolution {
        order,
        dimension: ker.basis.len(),
        unknowns,
        equations,
        exact: ker.exact,
        basis: ker.basis,
        warnings,
    })
}

/// Scales each column to unit largest entry; Taylor coefficients of
/// different degree differ by factorial-sized factors.
fn normalize_columns(rows: &mut [Vec<Scalar>], ncols: usize) {
    for j in 0..ncols {
        let s = rows.iter().map(|r| r[j].to_f64().abs()).fold(0.0, f64::max);
        if s > 0.0 {
            let inv = Scalar::float(1.0 / s);
            for r in rows.iter_mut() {
                if !r[j].is_zero() {
                    r[j] = &r[j] * &inv;
                }
            }
        }
    }
}

/// Dimension of the jet solution at several orders.
pub fn jet_dimensions(m: &MetricSpec, x: &[Scalar], orders: &[usize], opts: &EvalOptions) -> Result<Vec<JetSolution>> {
    orders.iter().map(|&k| jet_killing_solve(m, x, k, opts)).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct PointResidual {
    pub point: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "crate::num::serialize_opt_scalar")]
    pub residual: Option<Scalar>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LieDerivativeCheck {
    /// Largest entry of `L_ξ g` over the evaluated points.
    #[serde(serialize_with = "serialize_scalar")]
    pub max_residual: Scalar,
    pub points: Vec<PointResidual>,
}

/// `L_ξ g` for a symbolic vector field at each sample point, from
/// symbolic derivatives. Points where evaluation fails are recorded and
/// skipped.
pub fn lie_derivative_check(field: &[Expr], m: &MetricSpec, points: &[Vec<Scalar>], mode: Mode) -> Result<LieDerivativeCheck> {
    let n = m.dim();
    if field.len() != n {
        return Err(Error::ShapeMismatch(format!("vector field with {} components in dimension {n}", field.len())));
    }
    let dxi: Vec<Vec<Expr>> = field.iter().map(|f| (0..n).map(|a| derivative(f, a)).collect()).collect();
    let dg: Vec<Vec<Vec<Expr>>> = (0..n)
        .map(|a| (0..n).map(|b| (0..n).map(|c| derivative(m.component(a, b), c)).collect()).collect())
        .collect();
    let mut out = Vec::new();
    let mut worst = Scalar::zero();
    for p in points {
        let point = p.iter().map(Scalar::to_f64).collect();
        match lie_derivative_at(field, &dxi, &dg, m, p, mode) {
            Ok(r) => {
                if r.to_f64() > worst.to_f64() || (worst.is_zero() && !r.is_zero()) {
                    worst = r.clone();
                }
                out.push(PointResidual {
                    point,
                    residual: Some(r),
                    skipped: None,
                });
            }
            Err(e) => out.push(PointResidual {
                point,
                residual: None,
                skipped: Some(e.to_string()),
            }),
        }
    }
    Ok(LieDerivativeCheck {
        max_residual: worst,
        points: out,
    })
}

fn lie_derivative_at(
    field: &[Expr],
    dxi: &[Vec<Expr>],
    dg: &[Vec<Vec<Expr>>],
    m: &MetricSpec,
    p: &[Scalar],
    mode: Mode,
) -> Result<Scalar> {
    let n = m.dim();
    let ev = |e: &Expr| evaluate(e, p, mode);
    let xi = field.iter().map(ev).collect::<Result<Vec<_>>>()?;
    let g = m.evaluate(p, mode)?;
    let mut worst = Scalar::zero();
    for a in 0..n {
        for b in a..n {
            let mut acc = Scalar::zero();
            for c in 0..n {
                acc = &acc + &(&xi[c] * &ev(&dg[a][b][c])?);
                acc = &acc + &(&g[c][b] * &ev(&dxi[c][a])?);
                acc = &acc + &(&g[a][c] * &ev(&dxi[c][b])?);
            }
            let v = acc.abs();
            if v.to_f64() > worst.to_f64() || (worst.is_zero() && !v.is_zero()) {
                worst = v;
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests;
