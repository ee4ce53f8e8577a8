use super::*;
use crate::cli::catalog::lookup;
use crate::expr::parse;

fn solve(name: &str, order: usize, opts: &EvalOptions) -> JetSolution {
    let e = lookup(name).unwrap();
    jet_killing_solve(&e.metric(), &e.default_point(), order, opts).unwrap()
}

#[test]
fn classical_dimensions() {
    let exact = EvalOptions::default();
    assert_eq!(solve("euclidean2", 4, &exact).dimension, 3);
    let p = solve("paraboloid", 6, &exact);
    assert_eq!(p.dimension, 1);
    assert!(p.exact);
    assert_eq!(solve("perturbed2", 6, &exact).dimension, 0);
    assert_eq!(solve("hyperbolic", 6, &exact).dimension, 3);
    assert_eq!(solve("minkowski2", 6, &exact).dimension, 3);
}

#[test]
fn low_order_overcounts_then_stabilizes() {
    let exact = EvalOptions::default();
    let dims: Vec<usize> = (2..=7).map(|k| solve("perturbed2", k, &exact).dimension).collect();
    for w in dims.windows(2) {
        assert!(w[1] <= w[0], "{dims:?}");
    }
    assert!(dims[0] > 0);
    assert_eq!(*dims.last().unwrap(), 0);
}

#[test]
fn float_fallback_for_large_systems() {
    let s = solve("euclidean3", default_order(3), &EvalOptions::default());
    assert!(!s.exact);
    assert!(s.warnings.iter().any(|w| w.kind == WarningKind::FloatFallback));
    assert_eq!(s.dimension, 6);
    assert_eq!(solve("sphere3", default_order(3), &EvalOptions::default()).dimension, 6);
}

#[test]
fn sphere_in_float_mode() {
    assert_eq!(solve("sphere", default_order(2), &EvalOptions::float()).dimension, 3);
    assert_eq!(solve("euclidean-polar", default_order(2), &EvalOptions::float()).dimension, 3);
}

#[test]
fn order_must_be_at_least_two() {
    let e = lookup("euclidean2").unwrap();
    assert!(matches!(
        jet_killing_solve(&e.metric(), &e.default_point(), 1, &EvalOptions::default()),
        Err(Error::OrderTooLow(1))
    ));
}

#[test]
fn lie_derivative_examples() {
    let pts = |v: &[(i64, i64)]| vec![v.iter().map(|&(a, b)| Scalar::ratio(a, b)).collect::<Vec<_>>()];
    let e = lookup("euclidean2").unwrap();
    let m = e.metric();
    let rot = vec![parse("-y", m.chart()).unwrap(), parse("x", m.chart()).unwrap()];
    let r = lie_derivative_check(&rot, &m, &pts(&[(1, 3), (2, 7)]), Mode::Exact).unwrap();
    assert!(r.max_residual.is_zero());

    let s = lookup("sphere").unwrap();
    let m = s.metric();
    let dphi = vec![Expr::zero(), Expr::one()];
    let r = lie_derivative_check(&dphi, &m, &[s.default_point()], Mode::Float).unwrap();
    assert!(r.max_residual.to_f64() == 0.0);

    let p = lookup("paraboloid").unwrap();
    let m = p.metric();
    let rot = p.killing_fields().remove(0);
    let r = lie_derivative_check(&rot, &m, &pts(&[(1, 1), (0, 1)]), Mode::Float).unwrap();
    assert!(r.max_residual.to_f64() < 1e-10);

    let bad = vec![parse("x", m.chart()).unwrap(), Expr::zero()];
    let r = lie_derivative_check(&bad, &m, &pts(&[(1, 1), (0, 1)]), Mode::Exact).unwrap();
    assert!(!r.max_residual.is_zero());
}

#[test]
fn failing_points_are_skipped() {
    let h = lookup("hyperbolic").unwrap();
    let m = h.metric();
    let f = h.killing_fields().remove(1);
    let points = vec![vec![Scalar::ratio(1, 2), Scalar::zero()], h.default_point()];
    let r = lie_derivative_check(&f, &m, &points, Mode::Exact).unwrap();
    assert!(r.points[0].skipped.is_some());
    assert!(r.points[1].residual.as_ref().unwrap().is_zero());
}

#[test]
fn catalog_fields_pass() {
    for name in ["euclidean3", "hyperbolic", "minkowski2", "sphere3", "euclidean-polar", "sphere"] {
        let e = lookup(name).unwrap();
        let m = e.metric();
        for f in e.killing_fields() {
            let r = lie_derivative_check(&f, &m, &[e.default_point()], Mode::Float).unwrap();
            assert!(r.max_residual.to_f64() < 1e-10, "{name}");
        }
    }
}
