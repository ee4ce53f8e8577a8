//! Geometric diagnostics built on the flag: constant curvature, local
//! symmetry, the `p ⊕ t` decomposition and the analysis of Riemannian
//! surfaces through the Gaussian curvature and its derivatives.
//!
//! Verdicts are pointwise; where probe points are used the scope says so.

mod surface;

use serde::Serialize;

pub use surface::{surface_diagnostics, SurfaceBranch, SurfaceReport};

use crate::error::{Result, Warning, WarningKind};
use crate::flag::{fibre_dim, pairs, probe_points, FlagConfig, FlagResult, WElement};
use crate::linalg;
use crate::num::serialize_scalar;
use crate::scalar::Scalar;
use crate::tensor::{self, MetricSpec, TensorValue, Variance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Fails,
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scope {
    Pointwise,
    PointwiseAndProbes,
}

/// A verdict with the residual that decided it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub verdict: Verdict,
    #[serde(serialize_with = "serialize_scalar")]
    pub residual: Scalar,
    pub scope: Scope,
}

impl Check {
    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    pub fn not_applicable() -> Check {
        Check {
            verdict: Verdict::NotApplicable,
            residual: Scalar::zero(),
            scope: Scope::Pointwise,
        }
    }

    fn from_residuals(residuals: &[(Scalar, bool)], scope: Scope) -> Check {
        let vanish = residuals.iter().all(|(_, z)| *z);
        let residual = largest(residuals.iter().map(|(r, _)| r.clone()));
        Check {
            verdict: if vanish { Verdict::Holds } else { Verdict::Fails },
            residual,
            scope,
        }
    }
}

pub(crate) fn largest(values: impl IntoIterator<Item = Scalar>) -> Scalar {
    let mut best = Scalar::zero();
    for v in values {
        let a = v.abs();
        if a.to_f64() > best.to_f64() || (best.is_zero() && !a.is_zero()) {
            best = a;
        }
    }
    best
}

/// Zero test: exact values identically, floats against their magnitude.
pub(crate) fn negligible(s: &Scalar, tol: f64) -> bool {
    match s {
        Scalar::Exact(_) => s.is_zero(),
        Scalar::Float { value, mag } => value.abs() <= tol * mag,
    }
}

fn tensor_residual(t: &TensorValue, tol: f64) -> (Scalar, bool) {
    (largest(t.data().iter().cloned()), t.vanishes(tol, 0.0))
}

/// Runs `f` at `x` and at the probe points, dropping probes where the
/// metric cannot be evaluated.
fn at_points<T>(
    x: &[Scalar],
    config: &FlagConfig,
    warnings: &mut Vec<Warning>,
    module: &'static str,
    mut f: impl FnMut(&[Scalar]) -> Result<T>,
) -> Result<Vec<T>> {
    let mut out = vec![f(x)?];
    for p in probe_points(x, config.probes, &config.probe_radius, config.probe_seed) {
        match f(&p) {
            Ok(v) => out.push(v),
            Err(e) => warnings.push(Warning::new(
                WarningKind::ProbeSkipped,
                module,
                format!("probe {:?} skipped: {e}", p.iter().map(Scalar::to_f64).collect::<Vec<_>>()),
            )),
        }
    }
    Ok(out)
}

fn scope(config: &FlagConfig) -> Scope {
    if config.probes > 0 {
        Scope::PointwiseAndProbes
    } else {
        Scope::Pointwise
    }
}

/// Basis 2-form `dx^p ∧ dx^q` as an antisymmetric covariant tensor.
fn basis_form(n: usize, p: usize, q: usize) -> TensorValue {
    TensorValue::from_fn(n, vec![Variance::Co; 2], |i| {
        if (i[0], i[1]) == (p, q) {
            Scalar::one()
        } else if (i[0], i[1]) == (q, p) {
            Scalar::int(-1)
        } else {
            Scalar::zero()
        }
    })
}

/// `R⋆E_{pq}` for every basis 2-form, at one point.
fn star_on_forms(r: &TensorValue, ginv: &TensorValue) -> Result<Vec<TensorValue>> {
    let n = r.dim();
    pairs(n)
        .into_iter()
        .map(|(p, q)| tensor::star(r, &basis_form(n, p, q), ginv))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstantCurvature {
    pub check: Check,
    /// Which criterion decided: `R⋆L` for `n >= 3`, `dc` for surfaces.
    pub criterion: &'static str,
    /// Sectional curvature when constant.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "crate::num::serialize_opt_scalar")]
    pub kappa: Option<Scalar>,
    /// Largest entry of `R - κ C` at the point, `C` the canonical form.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "crate::num::serialize_opt_scalar")]
    pub canonical_residual: Option<Scalar>,
}

/// Constant curvature: `R⋆L = 0` for all 2-forms at `x` and the probes
/// when `n >= 3`; `dc = 0` at the same points for surfaces.
pub fn constant_curvature_test(
    m: &MetricSpec,
    x: &[Scalar],
    config: &FlagConfig,
    warnings: &mut Vec<Warning>,
) -> Result<ConstantCurvature> {
    let opts = config.eval;
    let n = m.dim();
    let (residuals, criterion) = if n == 2 {
        let r = at_points(x, config, warnings, "classify", |p| {
            let dc = surface::curvature_gradient(m, p, &opts)?;
            Ok((largest(dc.clone()), dc.iter().all(|s| negligible(s, opts.tol))))
        })?;
        (r, "dc = 0")
    } else {
        let r = at_points(x, config, warnings, "classify", |p| {
            let rt = tensor::riemann(m, p, 0, &opts)?.remove(0);
            let ginv = tensor::inverse_metric(m, p, &opts)?;
            let stars = star_on_forms(&rt, &ginv)?;
            let parts: Vec<_> = stars.iter().map(|t| tensor_residual(t, opts.tol)).collect();
            Ok((largest(parts.iter().map(|p| p.0.clone())), parts.iter().all(|p| p.1)))
        })?;
        (r, "R⋆L = 0")
    };
    let check = Check::from_residuals(&residuals, scope(config));
    let (kappa, canonical_residual) = if check.holds() {
        let r = tensor::riemann(m, x, 0, &opts)?.remove(0);
        let ginv = tensor::inverse_metric(m, x, &opts)?;
        let g = tensor::metric_tensor(m, x, &opts)?;
        let k = tensor::curvature_constant(&r, &ginv)?;
        let c = tensor::canonical_form(&g);
        let diff = TensorValue::from_fn(n, vec![Variance::Co; 4], |i| r.get(i) - &(&k * c.get(i)));
        (Some(k), Some(largest(diff.data().iter().cloned())))
    } else {
        (None, None)
    };
    Ok(ConstantCurvature {
        check,
        criterion,
        kappa,
        canonical_residual,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Decomposition {
    /// `dim t`, `t = {L : R⋆L = 0}`.
    pub t_rank: usize,
    /// `dim p⁽¹⁾`, `p⁽¹⁾ = {v : R⋆(R·v) = 0}`.
    pub p1_rank: usize,
    /// Basis of `t` as 2-forms, stored for `a < b`.
    #[serde(skip)]
    pub t_basis: Vec<Vec<Scalar>>,
    /// `dim t` at the probe points.
    pub probe_t_ranks: Vec<usize>,
}

fn t_kernel(r: &TensorValue, ginv: &TensorValue, tol: f64) -> Result<linalg::Kernel> {
    let stars = star_on_forms(r, ginv)?;
    let len = stars.first().map_or(0, |t| t.data().len());
    // columns are the images of the basis 2-forms
    let rows: Vec<Vec<Scalar>> = (0..len).map(|i| stars.iter().map(|t| t.data()[i].clone()).collect()).collect();
    Ok(linalg::kernel(&rows, stars.len(), tol))
}

fn p1_kernel(r: &TensorValue, ginv: &TensorValue, tol: f64) -> Result<linalg::Kernel> {
    let n = r.dim();
    let r_up = tensor::raise_last(r, ginv);
    let mut cols = Vec::with_capacity(n);
    for s in 0..n {
        let v = TensorValue::from_fn(n, vec![Variance::Co], |i| if i[0] == s { Scalar::one() } else { Scalar::zero() });
        let rv = tensor::dot(&r_up, &v)?;
        cols.push(tensor::star(r, &rv, ginv)?);
    }
    let len = cols[0].data().len();
    let rows: Vec<Vec<Scalar>> = (0..len).map(|i| cols.iter().map(|t| t.data()[i].clone()).collect()).collect();
    Ok(linalg::kernel(&rows, n, tol))
}

/// Ranks of `t` and `p⁽¹⁾` at `x`, with `dim t` checked at the probes.
pub fn symmetric_decomposition(
    m: &MetricSpec,
    x: &[Scalar],
    config: &FlagConfig,
    warnings: &mut Vec<Warning>,
) -> Result<Decomposition> {
    let opts = config.eval;
    let r = tensor::riemann(m, x, 0, &opts)?.remove(0);
    let ginv = tensor::inverse_metric(m, x, &opts)?;
    let t = t_kernel(&r, &ginv, opts.tol)?;
    let p1 = p1_kernel(&r, &ginv, opts.tol)?;
    let mut probe_t_ranks = Vec::new();
    let mut skipped = Vec::new();
    for p in probe_points(x, config.probes, &config.probe_radius, config.probe_seed) {
        let rank = (|| -> Result<usize> {
            let r = tensor::riemann(m, &p, 0, &opts)?.remove(0);
            let ginv = tensor::inverse_metric(m, &p, &opts)?;
            Ok(t_kernel(&r, &ginv, opts.tol)?.basis.len())
        })();
        match rank {
            Ok(k) => probe_t_ranks.push(k),
            Err(e) => skipped.push(e.to_string()),
        }
    }
    for e in skipped {
        warnings.push(Warning::new(WarningKind::ProbeSkipped, "classify", format!("probe skipped: {e}")));
    }
    if probe_t_ranks.iter().any(|&k| k != t.basis.len()) {
        warnings.push(Warning::new(
            WarningKind::Regularity,
            "classify",
            format!("dim t = {} at the point but {:?} at probes", t.basis.len(), probe_t_ranks),
        ));
    }
    Ok(Decomposition {
        t_rank: t.basis.len(),
        p1_rank: p1.basis.len(),
        t_basis: t.basis,
        probe_t_ranks,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LocallySymmetric {
    /// `∇R = 0` at the point and probes.
    pub nabla_r: Check,
    /// `R⋆R = 0` at the point and probes.
    pub r_star_r: Check,
    /// Terminal flag subspace equals `p ⊕ t`.
    pub flag_shape: Check,
    /// `∇R = 0` implies `R⋆R = 0`; false flags an upstream inconsistency.
    pub consistent: bool,
}

/// The three local-symmetry verdicts at `x`.
pub fn locally_symmetric_test(
    m: &MetricSpec,
    x: &[Scalar],
    flag: &FlagResult,
    decomposition: &Decomposition,
    config: &FlagConfig,
    warnings: &mut Vec<Warning>,
) -> Result<LocallySymmetric> {
    let opts = config.eval;
    let n = m.dim();
    let sc = scope(config);
    let nabla = at_points(x, config, warnings, "classify", |p| {
        let dr = tensor::riemann(m, p, 1, &opts)?.remove(1);
        Ok(tensor_residual(&dr, opts.tol))
    })?;
    let rr = at_points(x, config, warnings, "classify", |p| {
        let r = tensor::riemann(m, p, 0, &opts)?.remove(0);
        let ginv = tensor::inverse_metric(m, p, &opts)?;
        Ok(tensor_residual(&tensor::star(&r, &r, &ginv)?, opts.tol))
    })?;
    let nabla_r = Check::from_residuals(&nabla, sc);
    let r_star_r = Check::from_residuals(&rr, sc);

    // p ⊕ t inside the fibre
    let nn = fibre_dim(n);
    let mut pt: Vec<Vec<Scalar>> = (0..n)
        .map(|i| (0..nn).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect())
        .collect();
    for l in &decomposition.t_basis {
        let mut v = vec![Scalar::zero(); n];
        v.extend(l.iter().cloned());
        pt.push(v);
    }
    let terminal: Vec<Vec<Scalar>> = flag.terminal_basis().iter().map(WElement::to_vec).collect();
    let mut both = terminal.clone();
    both.extend(pt.iter().cloned());
    let joint = linalg::rank(&both, nn, opts.tol);
    let same = terminal.len() == pt.len() && joint == pt.len();
    let flag_shape = Check {
        verdict: if same { Verdict::Holds } else { Verdict::Fails },
        residual: Scalar::int((joint as i64 - terminal.len().min(pt.len()) as i64).abs()),
        scope: Scope::Pointwise,
    };
    Ok(LocallySymmetric {
        consistent: !nabla_r.holds() || r_star_r.holds(),
        nabla_r,
        r_star_r,
        flag_shape,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsReport {
    pub constant_curvature: ConstantCurvature,
    pub locally_symmetric: LocallySymmetric,
    pub decomposition: Decomposition,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surface: Option<SurfaceReport>,
    pub warnings: Vec<Warning>,
}

/// All diagnostics at `x`; the surface section is present iff `n = 2`
/// and the metric is Riemannian.
pub fn diagnostics(m: &MetricSpec, x: &[Scalar], flag: &FlagResult, config: &FlagConfig) -> Result<DiagnosticsReport> {
    let mut warnings = Vec::new();
    let constant_curvature = constant_curvature_test(m, x, config, &mut warnings)?;
    let decomposition = symmetric_decomposition(m, x, config, &mut warnings)?;
    let locally_symmetric = locally_symmetric_test(m, x, flag, &decomposition, config, &mut warnings)?;
    let surface = if m.dim() == 2 && m.is_riemannian() {
        let s = surface_diagnostics(m, x, config)?;
        warnings.extend(s.warnings.iter().cloned());
        Some(s)
    } else {
        None
    };
    Ok(DiagnosticsReport {
        constant_curvature,
        locally_symmetric,
        decomposition,
        surface,
        warnings,
    })
}

#[cfg(test)]
mod tests;
