//! Surfaces: the flag expressed through the Gaussian curvature `c`.
//!
//! With `dc ≠ 0`, `W⁽⁰⁾ = ker ∂c ⊕ Λ²`, `W⁽¹⁾` is cut out by
//! `c_{;ab}K^a + L_{ab}c^{,a} = 0`, and the terminal rank is 1 exactly when
//! `c_{;abc}K^a + L_{ab}c^{;a}_c + L_{ac}c^{;a}_b + R_{abcd}c^{,a}K^d = 0`
//! holds on `W⁽¹⁾`.

use serde::Serialize;

use crate::error::{Error, Result, Warning, WarningKind};
use crate::flag::{probe_points, FlagConfig, WElement};
use crate::jet::Jet;
use crate::linalg::{self, Matrix};
use crate::num::{serialize_opt_scalar, serialize_scalar, serialize_scalars};
use crate::scalar::Scalar;
use crate::tensor::{EvalOptions, Geometry, MetricSpec};

use super::{largest, negligible, Check, Scope, Verdict};

/// `c`, its covariant derivatives up to third order, `R` and `g^{-1}` at a point.
struct CurvatureJets {
    c: Scalar,
    dc: Vec<Scalar>,
    hess: Vec<Scalar>,
    third: Vec<Scalar>,
    riemann: Vec<Scalar>,
    ginv: Matrix,
}

fn curvature_jets(m: &MetricSpec, x: &[Scalar], opts: &EvalOptions, depth: usize) -> Result<CurvatureJets> {
    if m.dim() != 2 {
        return Err(Error::WrongDimension {
            expected: 2,
            found: m.dim(),
        });
    }
    m.at_point(x, opts.mode, opts.tol)?;
    let geo = Geometry::new(m, x, opts.mode, depth + 2)?;
    let g = geo.metric_jets();
    let det = g[0].mul(&g[3]).sub(&g[1].mul(&g[2]));
    // R_{1212} sits at flat index 5
    let c = geo.riemann_jets()[5].div(&det)?;
    let dc = geo.covariant_derivative(std::slice::from_ref(&c), 0);
    let hess = if depth >= 2 { geo.covariant_derivative(&dc, 1) } else { Vec::new() };
    let third = if depth >= 3 { geo.covariant_derivative(&hess, 2) } else { Vec::new() };
    let vals = |v: &[Jet]| v.iter().map(|j| j.value().clone()).collect::<Vec<_>>();
    Ok(CurvatureJets {
        c: c.value().clone(),
        dc: vals(&dc),
        hess: vals(&hess),
        third: vals(&third),
        riemann: vals(geo.riemann_jets()),
        ginv: geo.inverse_jets().chunks(2).map(vals).collect(),
    })
}

/// `c_{,a}` at `x`.
pub(crate) fn curvature_gradient(m: &MetricSpec, x: &[Scalar], opts: &EvalOptions) -> Result<Vec<Scalar>> {
    Ok(curvature_jets(m, x, opts, 1)?.dc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurfaceBranch {
    /// `dc = 0` at the point and the probes.
    ConstantCurvature,
    /// `dc ≠ 0` at the point.
    NonConstant,
    /// `dc = 0` at the point only; not classified.
    Degenerate,
}

#[derive(Debug, Clone, Serialize)]
pub struct SurfaceReport {
    #[serde(serialize_with = "serialize_scalar")]
    pub c: Scalar,
    /// `c_{,a}`.
    #[serde(serialize_with = "serialize_scalars")]
    pub dc: Vec<Scalar>,
    /// `∂c = c^{,a}`.
    #[serde(serialize_with = "serialize_scalars")]
    pub grad_c: Vec<Scalar>,
    pub branch: SurfaceBranch,
    /// Component of `dc ∧ D_{∂c}dc` on `dx^1 ∧ dx^2`.
    #[serde(serialize_with = "serialize_scalar")]
    pub wedge_test: Scalar,
    /// `c_{;ab}K^a c^{,b} = 0` for the nonzero `K ∈ ker ∂c`.
    pub linear_solvability: Check,
    /// `f` in `c_{;ab}c^{,b} = f c_{,a}` by least squares.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "serialize_opt_scalar")]
    pub f: Option<Scalar>,
    /// Residual of the proportionality, as a check.
    pub proportionality: Check,
    /// Integral curves of `∂c` are geodesic paths: `D_{∂c}∂c = f ∂c`.
    pub geodesic_path: Check,
    /// `dc ≠ 0`.
    pub condition_i: Check,
    /// `dc ∧ D_{∂c}dc = 0`.
    pub condition_ii: Check,
    /// The third-order condition on `W⁽¹⁾`.
    pub condition_iii: Check,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w1_rank: Option<usize>,
    /// Basis of `W⁽¹⁾`.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub w1_basis: Vec<WElement>,
    /// Number of local Killing fields implied by the analysis.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    pub warnings: Vec<Warning>,
}

fn check(value: &Scalar, tol: f64) -> Check {
    Check {
        verdict: if negligible(value, tol) { Verdict::Holds } else { Verdict::Fails },
        residual: value.abs(),
        scope: Scope::Pointwise,
    }
}

fn vector_check(values: &[Scalar], tol: f64) -> Check {
    Check {
        verdict: if values.iter().all(|v| negligible(v, tol)) { Verdict::Holds } else { Verdict::Fails },
        residual: largest(values.iter().cloned()),
        scope: Scope::Pointwise,
    }
}

fn sum(it: impl Iterator<Item = Scalar>) -> Scalar {
    it.fold(Scalar::zero(), |a, b| &a + &b)
}

/// The surface analysis at `x`.
pub fn surface_diagnostics(m: &MetricSpec, x: &[Scalar], config: &FlagConfig) -> Result<SurfaceReport> {
    if m.dim() != 2 {
        return Err(Error::WrongDimension {
            expected: 2,
            found: m.dim(),
        });
    }
    if !m.is_riemannian() {
        let (p, q) = m.signature();
        return Err(Error::NotRiemannian { p, q });
    }
    let opts = config.eval;
    let tol = opts.tol;
    let j = curvature_jets(m, x, &opts, 3)?;
    let n = 2;
    let gi = &j.ginv;
    let h = |a: usize, b: usize| &j.hess[a * n + b];
    let grad: Vec<Scalar> = (0..n).map(|a| sum((0..n).map(|b| &gi[a][b] * &j.dc[b]))).collect();
    let mut warnings = Vec::new();

    let dc_zero = j.dc.iter().all(|v| negligible(v, tol));
    let branch = if !dc_zero {
        SurfaceBranch::NonConstant
    } else {
        let mut constant = true;
        for p in probe_points(x, config.probes, &config.probe_radius, config.probe_seed) {
            match curvature_gradient(m, &p, &opts) {
                Ok(d) => constant &= d.iter().all(|v| negligible(v, tol)),
                Err(e) => warnings.push(Warning::new(WarningKind::ProbeSkipped, "classify", format!("probe skipped: {e}"))),
            }
        }
        if constant {
            SurfaceBranch::ConstantCurvature
        } else {
            warnings.push(Warning::new(
                WarningKind::DegeneratePoint,
                "classify",
                "dc vanishes at the point but not at nearby probes; the surface is not classified here",
            ));
            warnings.push(Warning::new(
                WarningKind::Regularity,
                "classify",
                "critical point of the Gaussian curvature",
            ));
            SurfaceBranch::Degenerate
        }
    };

    // v_a = c_{;ab} c^{,b}
    let v: Vec<Scalar> = (0..n).map(|a| sum((0..n).map(|b| h(a, b) * &grad[b]))).collect();
    let wedge_test = &(&j.dc[0] * &v[1]) - &(&j.dc[1] * &v[0]);

    // nonzero K in ker ∂c, raised
    let k_low = [-&grad[1], grad[0].clone()];
    let k_up: Vec<Scalar> = (0..n).map(|a| sum((0..n).map(|b| &gi[a][b] * &k_low[b]))).collect();
    let eq40 = sum((0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|(a, b)| &(h(a, b) * &k_up[a]) * &grad[b]));

    let (f, proportionality, geodesic_path) = if dc_zero {
        (None, Check::not_applicable(), Check::not_applicable())
    } else {
        let dd = sum(j.dc.iter().map(|d| d * d));
        let vd = sum(v.iter().zip(&j.dc).map(|(a, b)| a * b));
        let f = vd.checked_div(&dd)?;
        let res: Vec<Scalar> = v.iter().zip(&j.dc).map(|(a, b)| a - &(&f * b)).collect();
        // (D_{∂c}∂c)^a = g^{ab} v_b
        let acc: Vec<Scalar> = (0..n).map(|a| sum((0..n).map(|b| &gi[a][b] * &v[b]))).collect();
        let geo: Vec<Scalar> = acc.iter().zip(&grad).map(|(a, b)| a - &(&f * b)).collect();
        (Some(f), vector_check(&res, tol), vector_check(&geo, tol))
    };

    let condition_i = Check {
        verdict: if dc_zero { Verdict::Fails } else { Verdict::Holds },
        residual: largest(j.dc.iter().cloned()),
        scope: Scope::Pointwise,
    };
    let (condition_ii, linear_solvability) = if dc_zero {
        (Check::not_applicable(), Check::not_applicable())
    } else {
        (check(&wedge_test, tol), check(&eq40, tol))
    };

    let (w1_rank, w1_basis, condition_iii, dimension) = match branch {
        SurfaceBranch::ConstantCurvature => (None, Vec::new(), Check::not_applicable(), Some(3)),
        SurfaceBranch::Degenerate => (None, Vec::new(), Check::not_applicable(), None),
        SurfaceBranch::NonConstant => {
            let basis = w1(&j, &grad, tol);
            let rank = basis.len();
            let iii = if rank == 0 {
                Check {
                    verdict: Verdict::Fails,
                    residual: Scalar::zero(),
                    scope: Scope::Pointwise,
                }
            } else {
                let res: Vec<Scalar> = basis.iter().flat_map(|w| third_order(&j, &grad, w)).collect();
                vector_check(&res, tol)
            };
            let dim = if rank > 0 && iii.holds() { rank } else { 0 };
            (Some(rank), basis, iii, Some(dim))
        }
    };

    Ok(SurfaceReport {
        c: j.c.clone(),
        dc: j.dc.clone(),
        grad_c: grad,
        branch,
        wedge_test,
        linear_solvability,
        f,
        proportionality,
        geodesic_path,
        condition_i,
        condition_ii,
        condition_iii,
        w1_rank,
        w1_basis,
        dimension,
        warnings,
    })
}

/// Solutions `(K_1, K_2, L_12)` of `c^{,a}K_a = 0` and
/// `c_{;ab}K^a + L_{ab}c^{,a} = 0`.
fn w1(j: &CurvatureJets, grad: &[Scalar], tol: f64) -> Vec<WElement> {
    let n = 2;
    let gi = &j.ginv;
    let mut rows = vec![vec![grad[0].clone(), grad[1].clone(), Scalar::zero()]];
    for b in 0..n {
        let mut row: Vec<Scalar> = (0..n)
            .map(|e| sum((0..n).map(|a| &j.hess[a * n + b] * &gi[a][e])))
            .collect();
        // L_{ab} c^{,a}: L_{01} = ℓ, L_{10} = -ℓ
        row.push(if b == 0 { -&grad[1] } else { grad[0].clone() });
        rows.push(row);
    }
    linalg::kernel(&rows, 3, tol)
        .basis
        .iter()
        .map(|v| WElement::from_vec(n, v).expect("fibre length"))
        .collect()
}

/// `c_{;abc}K^a + L_{ab}c^{;a}_c + L_{ac}c^{;a}_b + R_{abcd}c^{,a}K^d` for all `b, c`.
fn third_order(j: &CurvatureJets, grad: &[Scalar], w: &WElement) -> Vec<Scalar> {
    let n = 2;
    let gi = &j.ginv;
    let k_up: Vec<Scalar> = (0..n).map(|a| sum((0..n).map(|e| &gi[a][e] * &w.k[e]))).collect();
    // c^{;a}_b
    let mixed = |a: usize, b: usize| sum((0..n).map(|e| &gi[a][e] * &j.hess[e * n + b]));
    let mut out = Vec::with_capacity(n * n);
    for b in 0..n {
        for c in 0..n {
            let mut acc = Scalar::zero();
            for a in 0..n {
                acc = &acc + &(&j.third[(a * n + b) * n + c] * &k_up[a]);
                acc = &acc + &(&w.l_at(a, b) * &mixed(a, c));
                acc = &acc + &(&w.l_at(a, c) * &mixed(a, b));
                for d in 0..n {
                    let r = &j.riemann[((a * n + b) * n + c) * n + d];
                    if !r.is_zero() {
                        acc = &acc + &(&(r * &grad[a]) * &k_up[d]);
                    }
                }
            }
            out.push(acc);
        }
    }
    out
}
