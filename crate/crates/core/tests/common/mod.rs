#![allow(dead_code)]

use killing_core::expr::{evaluate_f64, Expr, Func};
use killing_core::flag::WElement;
use killing_core::scalar::rational;
use killing_core::tensor::{TensorValue, Variance};
use killing_core::Scalar;
use proptest::prelude::*;
use rand::Rng;

pub fn q(rng: &mut impl Rng, lo: i64, hi: i64, den: i64) -> Scalar {
    Scalar::ratio(rng.random_range(lo..=hi), den)
}

pub fn symmetric(n: usize, rng: &mut impl Rng) -> Vec<Vec<Scalar>> {
    let mut s = vec![vec![Scalar::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let v = q(rng, -4, 4, 4);
            s[i][j] = v.clone();
            s[j][i] = v;
        }
    }
    s
}

/// `S_ac T_bd + T_ac S_bd - S_ad T_bc - T_ad S_bc`, an algebraic curvature tensor.
pub fn kulkarni_nomizu(s: &[Vec<Scalar>], t: &[Vec<Scalar>]) -> TensorValue {
    let n = s.len();
    TensorValue::from_fn(n, vec![Variance::Co; 4], |i| {
        let (a, b, c, d) = (i[0], i[1], i[2], i[3]);
        &(&(&(&s[a][c] * &t[b][d]) + &(&t[a][c] * &s[b][d])) - &(&s[a][d] * &t[b][c])) - &(&t[a][d] * &s[b][c])
    })
}

pub fn add(x: &TensorValue, y: &TensorValue, w: &Scalar) -> TensorValue {
    TensorValue::from_fn(x.dim(), x.variance().to_vec(), |i| x.get(i) + &(w * y.get(i)))
}

/// A random tensor with all algebraic curvature symmetries, as a sum of
/// Kulkarni–Nomizu products of random symmetric forms.
pub fn random_curvature(n: usize, rng: &mut impl Rng) -> TensorValue {
    let mut r = TensorValue::covariant(n, 4);
    for _ in 0..3 {
        let s = symmetric(n, rng);
        let t = symmetric(n, rng);
        r = add(&r, &kulkarni_nomizu(&s, &t), &q(rng, -2, 2, 2));
    }
    r
}

/// Diagonally dominant symmetric metric with entries of order one.
pub fn random_metric(n: usize, rng: &mut impl Rng) -> TensorValue {
    let mut g = vec![vec![Scalar::zero(); n]; n];
    for i in 0..n {
        g[i][i] = &Scalar::one() + &q(rng, 0, 4, 4);
        for j in (i + 1)..n {
            let v = q(rng, -1, 1, 8);
            g[i][j] = v.clone();
            g[j][i] = v;
        }
    }
    TensorValue::from_fn(n, vec![Variance::Co; 2], |i| g[i[0]][i[1]].clone())
}

pub fn identity(n: usize) -> TensorValue {
    TensorValue::from_fn(n, vec![Variance::Co; 2], |i| if i[0] == i[1] { Scalar::one() } else { Scalar::zero() })
}

pub fn random_element(n: usize, rng: &mut impl Rng) -> WElement {
    WElement {
        k: (0..n).map(|_| q(rng, -4, 4, 4)).collect(),
        l: (0..n * (n - 1) / 2).map(|_| q(rng, -4, 4, 4)).collect(),
    }
}

pub fn two_form(n: usize, upper: &[Scalar]) -> TensorValue {
    let w = WElement {
        k: vec![Scalar::zero(); n],
        l: upper.to_vec(),
    };
    TensorValue::from_fn(n, vec![Variance::Co; 2], |i| w.l_at(i[0], i[1]))
}

pub fn to_float_tensor(t: &TensorValue) -> TensorValue {
    TensorValue::from_fn(t.dim(), t.variance().to_vec(), |i| t.get(i).to_float())
}

pub fn to_float_element(x: &WElement) -> WElement {
    WElement {
        k: x.k.iter().map(Scalar::to_float).collect(),
        l: x.l.iter().map(Scalar::to_float).collect(),
    }
}

pub const FD_STEP: f64 = 1e-3;

pub fn expr_strategy(vars: usize) -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0..vars).prop_map(Expr::var),
        (-5i64..=5, 1i64..=4).prop_map(|(n, d)| Expr::constant(rational(n, d))),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
            // denominators bounded away from zero
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::div(a, Expr::add(Expr::int(1), Expr::pow(b, 2)))),
            inner.clone().prop_map(Expr::neg),
            (inner.clone(), 0i32..=3).prop_map(|(a, k)| Expr::pow(a, k)),
            inner.clone().prop_map(|a| Expr::call(Func::Sin, a)),
            inner.clone().prop_map(|a| Expr::call(Func::Cos, a)),
            inner.clone().prop_map(|a| Expr::call(Func::Exp, Expr::call(Func::Sin, a))),
            inner.clone().prop_map(|a| Expr::call(Func::Sqrt, Expr::add(Expr::int(1), Expr::pow(a, 2)))),
            inner.prop_map(|a| Expr::call(Func::Log, Expr::add(Expr::int(2), Expr::call(Func::Cos, a)))),
        ]
    })
}

pub fn point_strategy(vars: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1.0f64..1.0, vars)
}

pub fn central_difference(e: &Expr, x: &[f64], var: usize) -> f64 {
    let at = |t: f64| {
        let mut p = x.to_vec();
        p[var] += t;
        evaluate_f64(e, &p).expect("finite on the sample box")
    };
    let h = FD_STEP;
    (8.0 * (at(h) - at(-h)) - (at(2.0 * h) - at(-2.0 * h))) / (12.0 * h)
}
