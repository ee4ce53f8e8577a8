use std::f64::consts::FRAC_PI_4;

use super::*;

fn sphere() -> MetricSpec {
    MetricSpec::riemannian(&["theta", "phi"], &["1", "0", "sin(theta)^2"]).unwrap()
}

fn paraboloid() -> MetricSpec {
    MetricSpec::riemannian(&["x", "y"], &["1 + 4*x^2", "4*x*y", "1 + 4*y^2"]).unwrap()
}

fn euclid(n: usize) -> MetricSpec {
    let names: Vec<String> = (0..n).map(|i| format!("x{}", i + 1)).collect();
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut upper = Vec::new();
    for a in 0..n {
        for b in a..n {
            upper.push(if a == b { "1" } else { "0" });
        }
    }
    MetricSpec::riemannian(&names, &upper).unwrap()
}

fn q(n: i64, d: i64) -> Scalar {
    Scalar::ratio(n, d)
}

fn close(a: &Scalar, b: f64, tol: f64) {
    assert!((a.to_f64() - b).abs() <= tol, "{a} vs {b}");
}

#[test]
fn euclidean_inverse_is_identity() {
    let inv = inverse_metric(&euclid(2), &[q(3, 10), q(1, 5)], &EvalOptions::default()).unwrap();
    assert_eq!(inv.get(&[0, 0]), &Scalar::one());
    assert_eq!(inv.get(&[0, 1]), &Scalar::zero());
    assert!(inv.is_exact());
}

#[test]
fn sphere_inverse_at_quarter_pi() {
    let inv = inverse_metric(&sphere(), &[Scalar::float(FRAC_PI_4), Scalar::zero()], &EvalOptions::float()).unwrap();
    close(inv.get(&[0, 0]), 1.0, 1e-14);
    close(inv.get(&[1, 1]), 2.0, 1e-12);
}

#[test]
fn degenerate_metric_is_singular() {
    let m = MetricSpec::riemannian(&["x1", "x2"], &["1", "0", "x1"]).unwrap();
    let r = inverse_metric(&m, &[Scalar::zero(), Scalar::one()], &EvalOptions::default());
    assert!(matches!(r, Err(Error::SingularMetric { .. })));
}

#[test]
fn signature_mismatch_is_reported() {
    let m = MetricSpec::parse(&["t", "x"], &["-1", "0", "1"], (2, 0)).unwrap();
    let r = inverse_metric(&m, &[Scalar::zero(), Scalar::zero()], &EvalOptions::default());
    assert!(matches!(r, Err(Error::SignatureMismatch { found_p: 1, found_q: 1, .. })));
}

#[test]
fn christoffel_symbols() {
    let flat = christoffel(&euclid(2), &[q(1, 2), q(1, 3)], &EvalOptions::default()).unwrap();
    assert!(flat.data().iter().all(Scalar::is_zero));
    let s = christoffel(&sphere(), &[Scalar::float(FRAC_PI_4), Scalar::zero()], &EvalOptions::float()).unwrap();
    close(s.get(0, 1, 1), -0.5, 1e-14);
    close(s.get(1, 0, 1), 1.0, 1e-14);
    close(s.get(1, 1, 0), 1.0, 1e-14);
    let p = christoffel(&paraboloid(), &[Scalar::int(1), Scalar::zero()], &EvalOptions::default()).unwrap();
    assert!(p.metricity_residual <= 1e-12);
    let pf = christoffel(&paraboloid(), &[Scalar::float(1.0), Scalar::float(0.0)], &EvalOptions::float()).unwrap();
    assert!(pf.metricity_residual <= 1e-12);
}

#[test]
fn flat_curvature_vanishes() {
    let r = riemann(&euclid(3), &[q(1, 2), q(1, 3), q(1, 5)], 2, &EvalOptions::default()).unwrap();
    assert_eq!(r.len(), 3);
    assert!(r.iter().all(TensorValue::is_identically_zero));
}

#[test]
fn sphere_gaussian_curvature_is_one() {
    for theta in [0.3, FRAC_PI_4, 1.2, 2.5] {
        let x = [Scalar::float(theta), Scalar::float(0.4)];
        let c = gaussian_curvature(&sphere(), &x, &EvalOptions::float()).unwrap();
        close(&c, 1.0, 1e-12);
        let r = riemann(&sphere(), &x, 1, &EvalOptions::float()).unwrap();
        close(r[0].get(&[0, 1, 0, 1]), theta.sin().powi(2), 1e-12);
        assert!(r[1].max_abs() < 1e-12, "∇R = {}", r[1].max_abs());
    }
}

#[test]
fn paraboloid_gaussian_curvature() {
    let c = gaussian_curvature(&paraboloid(), &[Scalar::int(1), Scalar::zero()], &EvalOptions::default()).unwrap();
    assert_eq!(c, q(4, 25));
    let x = [Scalar::ratio(1, 3), Scalar::ratio(-1, 2)];
    let c = gaussian_curvature(&paraboloid(), &x, &EvalOptions::default()).unwrap();
    let rho2: f64 = 1.0 / 9.0 + 0.25;
    close(&c, 4.0 / (1.0 + 4.0 * rho2).powi(2), 1e-15);
}

#[test]
fn polar_coordinates_are_flat() {
    let m = MetricSpec::riemannian(&["r", "t"], &["1", "0", "r^2"]).unwrap();
    let c = gaussian_curvature(&m, &[Scalar::int(2), q(1, 2)], &EvalOptions::default()).unwrap();
    assert_eq!(c, Scalar::zero());
    let r = riemann(&m, &[Scalar::int(2), q(1, 2)], 2, &EvalOptions::default()).unwrap();
    assert!(r.iter().all(TensorValue::is_identically_zero));
}

#[test]
fn gaussian_curvature_requires_surface() {
    assert!(matches!(
        gaussian_curvature(&euclid(3), &[q(1, 2), q(1, 2), q(1, 2)], &EvalOptions::default()),
        Err(Error::WrongDimension { .. })
    ));
}

#[test]
fn order_cap_is_enforced() {
    let opts = EvalOptions {
        order_cap: Some(1),
        ..Default::default()
    };
    assert!(matches!(
        riemann(&euclid(2), &[q(1, 2), q(1, 2)], 2, &opts),
        Err(Error::OrderCapExceeded { requested: 2, cap: 1 })
    ));
}

fn check_symmetries(r: &TensorValue) {
    let n = r.dim();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let v = r.get(&[a, b, c, d]);
                    assert_eq!(v, &-r.get(&[b, a, c, d]));
                    assert_eq!(v, &-r.get(&[a, b, d, c]));
                    assert_eq!(v, r.get(&[c, d, a, b]));
                    let cyc = v + r.get(&[a, c, d, b]) + r.get(&[a, d, b, c]);
                    assert!(cyc.is_zero(), "first Bianchi {a}{b}{c}{d}: {cyc}");
                }
            }
        }
    }
}

#[test]
fn curvature_symmetries_exact() {
    let m = MetricSpec::riemannian(&["x", "y", "z"], &["1 + x^2", "x*y", "0", "2 + y*z", "z/3", "1 + x*z^2"]).unwrap();
    let x = [q(1, 2), q(-1, 3), q(2, 5)];
    let r = riemann(&m, &x, 1, &EvalOptions::default()).unwrap();
    assert!(r[0].is_exact() && !r[0].is_identically_zero());
    check_symmetries(&r[0]);
    // second Bianchi: R_{abcd;e} + R_{abde;c} + R_{abec;d} = 0
    let n = 3;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    for e in 0..n {
                        let s = r[1].get(&[a, b, c, d, e]) + r[1].get(&[a, b, d, e, c]) + r[1].get(&[a, b, e, c, d]);
                        assert!(s.is_zero());
                    }
                }
            }
        }
    }
}

#[test]
fn ricci_identity_for_covector() {
    // A_{c;ba} - A_{c;ab} = R_{abc}^d A_d for the covector field A = dx + x y dy
    let m = MetricSpec::riemannian(&["x", "y"], &["1 + x^2*y", "x/2", "1 + y^2"]).unwrap();
    let x = [q(1, 3), q(1, 2)];
    let geo = Geometry::new(&m, &x, Mode::Exact, 4).unwrap();
    let dom = crate::jet::JetDomain::new(&x, 4, Mode::Exact);
    let chart = m.chart();
    let a: Vec<_> = ["1", "x*y"]
        .iter()
        .map(|s| dom.expand(&crate::expr::parse(s, chart).unwrap()).unwrap())
        .collect();
    let da = geo.covariant_derivative(&a, 1);
    let dda = geo.covariant_derivative(&da, 2);
    let r = values(geo.riemann_jets());
    let ginv = values(geo.inverse_jets());
    let n = 2;
    for aa in 0..n {
        for b in 0..n {
            for c in 0..n {
                // A_{c;ba} is stored at [c, b, a]
                let lhs = dda[flat(&[c, b, aa], n)].value() - dda[flat(&[c, aa, b], n)].value();
                let mut rhs = Scalar::zero();
                for d in 0..n {
                    for e in 0..n {
                        rhs = &rhs + &(&(&r[flat(&[aa, b, c, e], n)] * &ginv[e * n + d]) * a[d].value());
                    }
                }
                assert_eq!(lhs, rhs);
            }
        }
    }
}

/// Naive reference for `⋆`, written out slot by slot.
fn star_reference(b: &TensorValue, t: &TensorValue, ginv: &[Vec<f64>]) -> Vec<f64> {
    let n = b.dim();
    let r = t.rank();
    let out_rank = r + 2;
    let len = n.pow(out_rank as u32);
    let mut out = vec![0.0; len];
    for (k, slot) in out.iter_mut().enumerate() {
        let idx = unflat(k, n, out_rank);
        let (a, bb, c, d) = (idx[0], idx[1], idx[2], idx[3]);
        let tail = &idx[4..];
        let mut total = 0.0;
        for s in 0..n {
            for u in 0..n {
                let tu = |second: usize| {
                    let mut ti = vec![u, second];
                    ti.extend_from_slice(tail);
                    ginv[s][u] * t.get(&ti).to_f64()
                };
                total += b.get(&[s, bb, c, d]).to_f64() * tu(a);
                total += b.get(&[a, s, c, d]).to_f64() * tu(bb);
                total += b.get(&[a, bb, s, d]).to_f64() * tu(c);
                total += b.get(&[a, bb, c, s]).to_f64() * tu(d);
            }
        }
        *slot = total;
    }
    out
}

fn random_curvature(n: usize, rng: &mut impl rand::Rng) -> TensorValue {
    // sum of terms S_ac S_bd - S_ad S_bc over random symmetric S, which has
    // all algebraic curvature symmetries
    let mut r = TensorValue::covariant(n, 4);
    for _ in 0..3 {
        let mut s = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in i..n {
                let v = rng.random_range(-3..=3);
                s[i][j] = v;
                s[j][i] = v;
            }
        }
        let w = rng.random_range(-2..=2);
        r = TensorValue::from_fn(n, vec![Variance::Co; 4], |i| {
            let term = s[i[0]][i[2]] * s[i[1]][i[3]] - s[i[0]][i[3]] * s[i[1]][i[2]];
            r.get(i) + &Scalar::int(w * term)
        });
    }
    r
}

#[test]
fn star_and_dot_match_naive_loops() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for n in [2, 3, 4] {
        for _ in 0..3 {
            let b = random_curvature(n, &mut rng);
            let g = TensorValue::from_fn(n, vec![Variance::Co; 2], |i| {
                Scalar::int(if i[0] == i[1] { 2 + i[0] as i64 } else { 0 })
                    + if i[0] != i[1] { Scalar::ratio(1, 3) } else { Scalar::zero() }
            });
            let ginv_m = crate::linalg::invert(&tensor_to_matrix(&g), 1e-14).unwrap().0;
            let ginv_f: Vec<Vec<f64>> = ginv_m.iter().map(|r| r.iter().map(Scalar::to_f64).collect()).collect();
            let t = TensorValue::from_fn(n, vec![Variance::Co; 3], |_| Scalar::int(rand::Rng::random_range(&mut rng, -4..=4)));
            let s = star(&b, &t, &g).unwrap();
            let want = star_reference(&b, &t, &ginv_f);
            for (x, y) in s.data().iter().zip(&want) {
                assert!((x.to_f64() - y).abs() < 1e-9);
            }
            let ginv = TensorValue::from_fn(n, vec![Variance::Contra; 2], |i| ginv_m[i[0]][i[1]].clone());
            let rup = raise_last(&b, &ginv);
            let k = TensorValue::from_fn(n, vec![Variance::Co], |i| Scalar::int(i[0] as i64 - 1));
            let d = dot(&rup, &k).unwrap();
            for a in 0..n {
                for bb in 0..n {
                    for c in 0..n {
                        let mut acc = 0.0;
                        for s in 0..n {
                            for u in 0..n {
                                acc += b.get(&[a, bb, c, u]).to_f64() * ginv_f[u][s] * k.get(&[s]).to_f64();
                            }
                        }
                        assert!((d.get(&[a, bb, c]).to_f64() - acc).abs() < 1e-9);
                    }
                }
            }
        }
    }
}

#[test]
fn star_vanishes_on_two_forms_in_dimension_two() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let g = TensorValue::from_fn(2, vec![Variance::Co; 2], |i| if i[0] == i[1] { Scalar::int(3) } else { Scalar::ratio(1, 2) });
    for _ in 0..10 {
        let b = random_curvature(2, &mut rng);
        let l = rand::Rng::random_range(&mut rng, -5..=5);
        let form = TensorValue::from_fn(2, vec![Variance::Co; 2], |i| Scalar::int(match (i[0], i[1]) {
            (0, 1) => l,
            (1, 0) => -l,
            _ => 0,
        }));
        assert!(star(&b, &form, &g).unwrap().is_identically_zero());
    }
}

#[test]
fn star_shape_errors_and_zero() {
    let g = TensorValue::from_fn(2, vec![Variance::Co; 2], |i| if i[0] == i[1] { Scalar::one() } else { Scalar::zero() });
    let b = TensorValue::covariant(2, 4);
    let v = TensorValue::covariant(2, 1);
    assert!(matches!(star(&b, &v, &g), Err(Error::ShapeMismatch(_))));
    let t = TensorValue::from_fn(2, vec![Variance::Co; 2], |i| Scalar::int(i[0] as i64 + 2 * i[1] as i64));
    assert!(star(&b, &t, &g).unwrap().is_identically_zero());
    assert!(matches!(dot(&b, &v), Err(Error::ShapeMismatch(_))));
}

#[test]
fn dot_with_delta_gives_raised_slice() {
    let m = sphere();
    let x = [Scalar::float(0.9), Scalar::float(0.1)];
    let opts = EvalOptions::float();
    let r = &riemann(&m, &x, 0, &opts).unwrap()[0];
    let ginv = inverse_metric(&m, &x, &opts).unwrap();
    let rup = raise_last(r, &ginv);
    for e in 0..2 {
        let delta = TensorValue::from_fn(2, vec![Variance::Co], |i| if i[0] == e { Scalar::one() } else { Scalar::zero() });
        let d = dot(&rup, &delta).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    assert_eq!(d.get(&[a, b, c]).to_f64(), rup.get(&[a, b, c, e]).to_f64());
                }
            }
        }
    }
}
