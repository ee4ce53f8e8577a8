use super::*;
use crate::cli::catalog::lookup;
use crate::expr::{derivative, Expr};
use crate::flag::{flag_at, killing_section};
use crate::scalar::Mode;

fn ctx_at(name: &str, opts: &EvalOptions) -> (BracketContext, Vec<Scalar>) {
    let e = lookup(name).unwrap();
    let m = e.metric();
    let x = e.default_point();
    let r = tensor::riemann(&m, &x, 0, opts).unwrap().remove(0);
    let g = tensor::metric_tensor(&m, &x, opts).unwrap();
    (BracketContext::new(&r, &g).unwrap(), x)
}

fn w(k: &[i64], l: &[i64]) -> WElement {
    WElement {
        k: k.iter().map(|&v| Scalar::int(v)).collect(),
        l: l.iter().map(|&v| Scalar::int(v)).collect(),
    }
}

fn analyze(name: &str, opts: &EvalOptions) -> LieAlgebraResult {
    let e = lookup(name).unwrap();
    let m = e.metric();
    let x = e.default_point();
    let f = flag_at(&m, &x, opts).unwrap();
    lie_algebra(&m, &x, &f, opts).unwrap()
}

#[test]
fn translations_commute_in_flat_space() {
    let (ctx, _) = ctx_at("euclidean3", &EvalOptions::default());
    let b = ctx.bracket(&w(&[1, 0, 0], &[0, 0, 0]), &w(&[0, 1, 0], &[0, 0, 0])).unwrap();
    assert!(b.to_vec().iter().all(Scalar::is_zero));
}

#[test]
fn bracket_is_antisymmetric() {
    let (ctx, _) = ctx_at("paraboloid", &EvalOptions::default());
    let x = w(&[1, 2], &[3]);
    let y = w(&[-2, 5], &[1]);
    let a = ctx.bracket(&x, &y).unwrap();
    let b = ctx.bracket(&y, &x).unwrap();
    assert_eq!(a.to_vec(), b.to_vec().iter().map(|v| -v).collect::<Vec<_>>());
    assert!(ctx.bracket(&x, &x).unwrap().to_vec().iter().all(Scalar::is_zero));
}

#[test]
fn bracket_rejects_wrong_shapes() {
    let (ctx, _) = ctx_at("euclidean2", &EvalOptions::default());
    assert!(matches!(
        ctx.bracket(&w(&[1, 0, 0], &[0, 0, 0]), &w(&[1, 0], &[0])),
        Err(Error::ShapeMismatch(_))
    ));
}

#[test]
fn sphere_scaling_anchor() {
    // orthonormal frame on the unit sphere at the equator: g = 1
    let m = MetricSpec::riemannian(&["theta", "phi"], &["1", "0", "sin(theta)^2"]).unwrap();
    let x = vec![Scalar::float(std::f64::consts::FRAC_PI_2), Scalar::zero()];
    let opts = EvalOptions::float();
    let r = tensor::riemann(&m, &x, 0, &opts).unwrap().remove(0);
    let g = tensor::metric_tensor(&m, &x, &opts).unwrap();
    let ctx = BracketContext::new(&r, &g).unwrap();
    let c = tensor::gaussian_curvature(&m, &x, &opts).unwrap().to_f64();
    assert!((c - 1.0).abs() < 1e-12);
    let xe = WElement {
        k: vec![Scalar::float(1.0), Scalar::zero()],
        l: vec![Scalar::zero()],
    };
    let ye = WElement {
        k: vec![Scalar::zero(), Scalar::float(1.0)],
        l: vec![Scalar::zero()],
    };
    let h = ctx.bracket(&xe, &ye).unwrap();
    assert!(h.k.iter().all(|v| v.to_f64().abs() < 1e-12));
    let hx = ctx.bracket(&h, &xe).unwrap();
    let hy = ctx.bracket(&h, &ye).unwrap();
    // with this curvature sign: [H,X] = sg(c) Y and [H,Y] = -sg(c) X
    let s = c.signum();
    assert!(hx.sub(&WElement { k: vec![Scalar::zero(), Scalar::float(s)], l: vec![Scalar::zero()] }).max_abs() < 1e-12);
    assert!(hy.sub(&WElement { k: vec![Scalar::float(-s), Scalar::zero()], l: vec![Scalar::zero()] }).max_abs() < 1e-12);
}

#[test]
fn flat_plane_gives_e2() {
    let a = analyze("euclidean2", &EvalOptions::default());
    assert_eq!(a.dim, 3);
    assert!(a.closure_residual.is_zero());
    assert!(a.jacobi_residual.is_zero());
    assert_eq!(a.killing_form.signature, Signature { positive: 0, negative: 1, zero: 2 });
    assert_eq!(a.derived_series, vec![3, 2, 0]);
    assert_eq!(a.label, AlgebraLabel::EuclideanE2);
    assert_eq!(a.label.to_string(), "euclidean-e(2)-type");
    // two commuting translations
    let kinds: Vec<bool> = a.basis.iter().map(|b| b.l.iter().all(Scalar::is_zero)).collect();
    for i in 0..3 {
        for j in 0..3 {
            if kinds[i] && kinds[j] {
                assert!((0..3).all(|k| a.constant(i, j, k).is_zero()));
            }
        }
    }
}

#[test]
fn catalog_labels() {
    let float = EvalOptions::float();
    let exact = EvalOptions::default();
    for (name, opts, label) in [
        ("sphere", float, "so(3)-type"),
        ("hyperbolic", exact, "sl(2,R)-type"),
        ("hyperbolic", float, "sl(2,R)-type"),
        ("euclidean-polar", float, "euclidean-e(2)-type"),
        ("paraboloid", exact, "abelian-1d"),
        ("perturbed2", exact, "trivial"),
        ("minkowski2", exact, "semidirect-e(1,1)-type"),
        ("euclidean3", exact, "semidirect-e(3)-type"),
        ("sphere3", exact, "other-with-invariants"),
    ] {
        let a = analyze(name, &opts);
        assert_eq!(a.label.to_string(), label, "{name}");
        assert!(a.closure_residual.to_f64() < 1e-9, "{name}");
        assert!(a.jacobi_residual.to_f64() < 1e-9, "{name}");
    }
}

#[test]
fn sphere_constants_are_cyclic() {
    let a = analyze("sphere", &EvalOptions::float());
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        let v = a.constant(i, j, k).to_f64().abs();
        assert!((v - 1.0).abs() < 1e-9, "c^{k}_{i}{j} = {v}");
    }
    assert_eq!(a.killing_form.signature.negative, 3);
}

#[test]
fn sphere3_is_so4() {
    let a = analyze("sphere3", &EvalOptions::default());
    assert_eq!(a.dim, 6);
    assert_eq!(a.killing_form.signature.negative, 6);
    assert_eq!(a.derived_series, vec![6]);
    assert!(matches!(classify_algebra(&a, 1e-9), Err(Error::UnknownClass(_))));
}

#[test]
fn killing_form_examples() {
    let zero = vec![vec![vec![Scalar::zero(); 2]; 2]; 2];
    let k = killing_form(&zero, 1e-9);
    assert!(k.matrix.iter().flatten().all(Scalar::is_zero));
    // so(3): [e_i, e_j] = ε_ijk e_k
    let mut c = vec![vec![vec![Scalar::zero(); 3]; 3]; 3];
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        c[i][j][k] = Scalar::one();
        c[j][i][k] = Scalar::int(-1);
    }
    let k = killing_form(&c, 1e-9);
    assert_eq!(k.signature, Signature { positive: 0, negative: 3, zero: 0 });
    assert_eq!(k.matrix[0][0], Scalar::int(-2));
}

#[test]
fn one_dimensional_algebra() {
    let a = analyze("paraboloid", &EvalOptions::default());
    assert_eq!(a.dim, 1);
    assert!(a.constant(0, 0, 0).is_zero());
    assert!(a.closure_residual.is_zero());
}

#[test]
fn non_closed_subspace_is_reported() {
    let (ctx, _) = ctx_at("euclidean2", &EvalOptions::default());
    // translation and rotation without the second translation
    let basis = vec![w(&[1, 0], &[0]), w(&[0, 0], &[1])];
    assert!(matches!(structure_constants(&basis, &ctx, 1e-9), Err(Error::NotClosed { i: 0, j: 1, .. })));
}

#[test]
fn jacobi_two_formulas_agree_in_dimension_two() {
    let (ctx, _) = ctx_at("paraboloid", &EvalOptions::default());
    let t = jacobi_triple(&ctx, &w(&[1, 2], &[3]), &w(&[0, 1], &[-1]), &w(&[2, -1], &[1])).unwrap();
    assert!(t.discrepancy.is_zero());
    assert!(t.star.is_zero());
    assert!(t.cyclic.is_zero());
}

fn commutator(a: &[Expr], b: &[Expr]) -> Vec<Expr> {
    let n = a.len();
    (0..n)
        .map(|i| {
            let mut acc = Expr::zero();
            for j in 0..n {
                acc = Expr::add(acc, Expr::mul(a[j].clone(), derivative(&b[i], j)));
                acc = Expr::sub(acc, Expr::mul(b[j].clone(), derivative(&a[i], j)));
            }
            acc
        })
        .collect()
}

#[test]
fn killing_bracket_correspondence() {
    for (name, mode) in [("hyperbolic", Mode::Exact), ("sphere", Mode::Float), ("sphere3", Mode::Exact), ("euclidean-polar", Mode::Float)] {
        let e = lookup(name).unwrap();
        let m = e.metric();
        let x = e.default_point();
        let opts = EvalOptions { mode, ..EvalOptions::default() };
        let (ctx, _) = ctx_at(name, &opts);
        let fields = e.killing_fields();
        for i in 0..fields.len() {
            for j in (i + 1)..fields.len() {
                let phi = |f: &[Expr]| killing_section(&m, f, &x, mode).unwrap().value;
                let lhs = phi(&commutator(&fields[i], &fields[j]));
                let rhs = ctx.bracket(&phi(&fields[i]), &phi(&fields[j])).unwrap();
                assert!(lhs.sub(&rhs).max_abs() < 1e-8, "{name} ({i},{j}): {:?} vs {:?}", lhs, rhs);
            }
        }
    }
}

