use super::*;
use crate::cli::catalog::{catalog, lookup};
use crate::error::Error;
use crate::flag::{derived_flag, flag_at};
use crate::tensor::EvalOptions;

fn config(opts: EvalOptions) -> FlagConfig {
    FlagConfig {
        eval: opts,
        ..FlagConfig::default()
    }
}

fn exact() -> FlagConfig {
    config(EvalOptions::default())
}

fn float() -> FlagConfig {
    config(EvalOptions::float())
}

fn entry(name: &str) -> (MetricSpec, Vec<Scalar>) {
    let e = lookup(name).unwrap();
    (e.metric(), e.default_point())
}

fn report(name: &str, cfg: &FlagConfig) -> DiagnosticsReport {
    let (m, x) = entry(name);
    let f = derived_flag(&m, &x, cfg).unwrap();
    diagnostics(&m, &x, &f, cfg).unwrap()
}

#[test]
fn constant_curvature_examples() {
    let mut w = Vec::new();
    let (m, x) = entry("sphere3");
    let cc = constant_curvature_test(&m, &x, &exact(), &mut w).unwrap();
    assert!(cc.check.holds());
    assert_eq!(cc.kappa, Some(Scalar::one()));
    assert!(cc.canonical_residual.unwrap().is_zero());

    let (m, x) = entry("euclidean3");
    let cc = constant_curvature_test(&m, &x, &exact(), &mut w).unwrap();
    assert!(cc.check.holds());
    assert_eq!(cc.kappa, Some(Scalar::zero()));

    let (m, x) = entry("paraboloid");
    let cc = constant_curvature_test(&m, &x, &exact(), &mut w).unwrap();
    assert_eq!(cc.check.verdict, Verdict::Fails);
    assert_eq!(cc.criterion, "dc = 0");
    assert!(cc.kappa.is_none());

    let (m, x) = entry("hyperbolic");
    let cc = constant_curvature_test(&m, &x, &exact(), &mut w).unwrap();
    assert_eq!(cc.kappa, Some(Scalar::int(-1)));
    assert!(w.is_empty());
}

#[test]
fn non_constant_three_metric_fails_star_test() {
    let m = MetricSpec::riemannian(&["x", "y", "z"], &["1", "0", "0", "1 + x^2", "0", "1 + y^2"]).unwrap();
    let x = vec![Scalar::ratio(1, 2), Scalar::ratio(1, 3), Scalar::zero()];
    let cc = constant_curvature_test(&m, &x, &exact(), &mut Vec::new()).unwrap();
    assert_eq!(cc.check.verdict, Verdict::Fails);
    assert_eq!(cc.scope_label(), "pointwise-and-probes");
}

impl ConstantCurvature {
    fn scope_label(&self) -> String {
        serde_json::to_value(self.check.scope).unwrap().as_str().unwrap().to_string()
    }
}

#[test]
fn locally_symmetric_examples() {
    let r = report("sphere", &float());
    let ls = &r.locally_symmetric;
    assert!(ls.nabla_r.holds() && ls.r_star_r.holds() && ls.flag_shape.holds());
    assert!(ls.consistent);

    for name in ["euclidean2", "euclidean3", "minkowski2"] {
        let r = report(name, &exact());
        let ls = &r.locally_symmetric;
        assert!(ls.nabla_r.holds() && ls.r_star_r.holds() && ls.flag_shape.holds(), "{name}");
        let n = lookup(name).unwrap().dim();
        assert_eq!(r.decomposition.t_rank, n * (n - 1) / 2);
    }

    // R⋆R vanishes identically on surfaces, so only (a) and (c) fail
    let r = report("paraboloid", &exact());
    let ls = &r.locally_symmetric;
    assert_eq!(ls.nabla_r.verdict, Verdict::Fails);
    assert!(ls.r_star_r.holds());
    assert!(ls.r_star_r.residual.is_zero());
    assert_eq!(ls.flag_shape.verdict, Verdict::Fails);
    assert!(ls.consistent);
}

#[test]
fn decomposition_ranks() {
    for name in ["paraboloid", "perturbed2", "hyperbolic"] {
        assert_eq!(report(name, &exact()).decomposition.t_rank, 1, "{name}");
    }
    let d = report("sphere3", &exact()).decomposition;
    assert_eq!(d.t_rank, 3);
    assert_eq!(d.p1_rank, 3);
    assert!(d.probe_t_ranks.iter().all(|&k| k == 3));
}

/// `R⋆L` written out by hand over index loops, for a cross-check.
fn naive_t_rank(r: &TensorValue, ginv: &TensorValue) -> usize {
    let n = r.dim();
    let pr = pairs(n);
    let mut rows = vec![vec![Scalar::zero(); pr.len()]; n.pow(4)];
    for (col, &(p, q)) in pr.iter().enumerate() {
        let l = |a: usize, b: usize| -> i64 {
            if (a, b) == (p, q) {
                1
            } else if (a, b) == (q, p) {
                -1
            } else {
                0
            }
        };
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let mut acc = Scalar::zero();
                        for s in 0..n {
                            for t in 0..n {
                                let g = ginv.get(&[s, t]);
                                acc = &acc + &(&(r.get(&[s, b, c, d]) * g) * &Scalar::int(l(t, a)));
                                acc = &acc + &(&(r.get(&[a, s, c, d]) * g) * &Scalar::int(l(t, b)));
                                acc = &acc + &(&(r.get(&[a, b, s, d]) * g) * &Scalar::int(l(t, c)));
                                acc = &acc + &(&(r.get(&[a, b, c, s]) * g) * &Scalar::int(l(t, d)));
                            }
                        }
                        rows[((a * n + b) * n + c) * n + d][col] = acc;
                    }
                }
            }
        }
    }
    pr.len() - linalg::rank(&rows, pr.len(), 1e-9)
}

#[test]
fn generic_three_metric_t_rank_matches_naive() {
    let m = MetricSpec::riemannian(&["x", "y", "z"], &["1 + y^2", "x/3", "0", "1 + z^2", "0", "2 + x*y"]).unwrap();
    let x = vec![Scalar::ratio(1, 2), Scalar::ratio(1, 3), Scalar::ratio(1, 5)];
    let opts = EvalOptions::default();
    let d = symmetric_decomposition(&m, &x, &exact(), &mut Vec::new()).unwrap();
    let r = tensor::riemann(&m, &x, 0, &opts).unwrap().remove(0);
    let ginv = tensor::inverse_metric(&m, &x, &opts).unwrap();
    assert_eq!(d.t_rank, naive_t_rank(&r, &ginv));
    assert!(d.t_rank < 3);
}

#[test]
fn sphere_surface_short_circuits() {
    let (m, x) = entry("sphere");
    let s = surface_diagnostics(&m, &x, &float()).unwrap();
    assert_eq!(s.branch, SurfaceBranch::ConstantCurvature);
    assert_eq!(s.dimension, Some(3));
    assert_eq!(s.condition_i.verdict, Verdict::Fails);
    assert_eq!(s.condition_ii.verdict, Verdict::NotApplicable);
    assert!((s.c.to_f64() - 1.0).abs() < 1e-12);
}

#[test]
fn paraboloid_surface_conditions() {
    let (m, x) = entry("paraboloid");
    let s = surface_diagnostics(&m, &x, &exact()).unwrap();
    assert_eq!(s.branch, SurfaceBranch::NonConstant);
    assert_eq!(s.c, Scalar::ratio(4, 25));
    assert!(s.wedge_test.is_zero());
    assert!(s.condition_i.holds() && s.condition_ii.holds() && s.condition_iii.holds());
    assert!(s.condition_iii.residual.is_zero());
    assert_eq!(s.w1_rank, Some(1));
    assert_eq!(s.dimension, Some(1));
    // ∂c is radial at (1, 0)
    assert!(s.dc[1].is_zero() && !s.dc[0].is_zero());
    assert!(s.proportionality.holds() && s.geodesic_path.holds());
    assert!(s.f.is_some());
    assert!(s.linear_solvability.holds());

    let s = surface_diagnostics(&m, &x, &float()).unwrap();
    assert!(s.condition_iii.holds());
    assert!(s.condition_iii.residual.to_f64() < 1e-9);
    assert!(s.wedge_test.to_f64().abs() < 1e-9);
    assert_eq!(s.dimension, Some(1));
}

#[test]
fn perturbed_surface_has_nonzero_wedge() {
    let (m, x) = entry("perturbed2");
    let s = surface_diagnostics(&m, &x, &exact()).unwrap();
    assert!(!s.wedge_test.is_zero());
    assert_eq!(s.condition_ii.verdict, Verdict::Fails);
    assert_eq!(s.linear_solvability.verdict, Verdict::Fails);
    assert_eq!(s.w1_rank, Some(0));
    assert_eq!(s.dimension, Some(0));
}

#[test]
fn surface_dimension_matches_flag() {
    for e in catalog().iter().filter(|e| e.dim() == 2 && e.signature.1 == 0) {
        let m = e.metric();
        let x = e.default_point();
        let cfg = if x.iter().all(|s| s.is_exact()) && e.name != "sphere" { exact() } else { float() };
        let s = surface_diagnostics(&m, &x, &cfg).unwrap();
        let f = flag_at(&m, &x, &cfg.eval).unwrap();
        assert_eq!(s.dimension, Some(f.terminal_rank), "{}", e.name);
        if s.branch == SurfaceBranch::NonConstant {
            assert_eq!(s.condition_ii.verdict, s.linear_solvability.verdict, "{}", e.name);
        }
    }
}

#[test]
fn curvature_critical_point_is_degenerate() {
    let (m, _) = entry("paraboloid");
    let s = surface_diagnostics(&m, &[Scalar::zero(), Scalar::zero()], &exact()).unwrap();
    assert_eq!(s.branch, SurfaceBranch::Degenerate);
    assert_eq!(s.dimension, None);
    assert!(s.warnings.iter().any(|w| w.kind == WarningKind::DegeneratePoint));
}

#[test]
fn surface_errors() {
    let (m, x) = entry("euclidean3");
    assert!(matches!(surface_diagnostics(&m, &x, &exact()), Err(Error::WrongDimension { .. })));
    let (m, x) = entry("minkowski2");
    assert!(matches!(surface_diagnostics(&m, &x, &exact()), Err(Error::NotRiemannian { p: 1, q: 1 })));
    assert!(report("minkowski2", &exact()).surface.is_none());
}
