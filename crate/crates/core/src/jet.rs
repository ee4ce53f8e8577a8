//! Truncated multivariate Taylor polynomials ("jets").
//!
//! A jet of order `k` in `n` variables stores the Taylor coefficients
//! `c_α = ∂^α f(x) / α!` for all multi-indices with `|α| <= k`. Monomials are
//! ordered by total degree first, so a lower-order truncation of a jet is a
//! prefix of its coefficient vector.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::expr::{evaluate_in, EvalDomain, Expr, Func};
use crate::scalar::{Mode, Scalar};

/// Monomial enumeration and multiplication tables for one variable count.
#[derive(Debug)]
pub struct MonomialBasis {
    nvars: usize,
    max_order: usize,
    exponents: Vec<Vec<u8>>,
    /// `degree_end[d]` = number of monomials of degree <= d.
    degree_end: Vec<usize>,
    index: HashMap<Vec<u8>, usize>,
    /// `(i, j, k)` with `m_i * m_j = m_k`, sorted by `k`.
    products: Vec<(u32, u32, u32)>,
    /// `product_end[d]` = number of products whose result has degree <= d.
    product_end: Vec<usize>,
    /// `lower[v][k]` = index of `m_k / x_v` and the exponent of `x_v` in `m_k`.
    lower: Vec<Vec<Option<(usize, u8)>>>,
}

impl MonomialBasis {
    fn build(nvars: usize, max_order: usize) -> MonomialBasis {
        let mut exponents: Vec<Vec<u8>> = Vec::new();
        let mut degree_end = Vec::with_capacity(max_order + 1);
        for d in 0..=max_order {
            let mut of_degree = Vec::new();
            let mut current = vec![0u8; nvars];
            push_compositions(d, 0, &mut current, &mut of_degree);
            exponents.extend(of_degree);
            degree_end.push(exponents.len());
        }
        let index: HashMap<Vec<u8>, usize> = exponents
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        let degree = |e: &[u8]| e.iter().map(|&v| v as usize).sum::<usize>();
        let mut products = Vec::new();
        for (i, a) in exponents.iter().enumerate() {
            let da = degree(a);
            for (j, b) in exponents.iter().enumerate() {
                if da + degree(b) > max_order {
                    continue;
                }
                let sum: Vec<u8> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                products.push((i as u32, j as u32, index[&sum] as u32));
            }
        }
        products.sort_by_key(|&(i, j, k)| (k, i, j));
        let mut product_end = Vec::with_capacity(max_order + 1);
        for d in 0..=max_order {
            let limit = degree_end[d] as u32;
            product_end.push(products.partition_point(|&(_, _, k)| k < limit));
        }
        let lower = (0..nvars)
            .map(|v| {
                exponents
                    .iter()
                    .map(|e| {
                        (e[v] > 0).then(|| {
                            let mut l = e.clone();
                            l[v] -= 1;
                            (index[&l], e[v])
                        })
                    })
                    .collect()
            })
            .collect();
        MonomialBasis {
            nvars,
            max_order,
            exponents,
            degree_end,
            index,
            products,
            product_end,
            lower,
        }
    }

    /// Shared basis for `nvars` variables supporting at least `order`.
    pub fn get(nvars: usize, order: usize) -> Arc<MonomialBasis> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<MonomialBasis>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("basis cache poisoned");
        if let Some(b) = guard.get(&nvars) {
            if b.max_order >= order {
                return b.clone();
            }
        }
        let built = Arc::new(MonomialBasis::build(nvars, order));
        guard.insert(nvars, built.clone());
        built
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Number of monomials of degree <= `order`.
    pub fn size(&self, order: usize) -> usize {
        self.degree_end[order]
    }

    pub fn exponent(&self, k: usize) -> &[u8] {
        &self.exponents[k]
    }

    pub fn index_of(&self, exponent: &[u8]) -> Option<usize> {
        self.index.get(exponent).copied()
    }

    /// Products whose result has degree at most `order`.
    pub fn products(&self, order: usize) -> &[(u32, u32, u32)] {
        &self.products[..self.product_end[order]]
    }
}

fn push_compositions(remaining: usize, var: usize, current: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    let n = current.len();
    if n == 0 {
        if remaining == 0 {
            out.push(Vec::new());
        }
        return;
    }
    if var == n - 1 {
        current[var] = remaining as u8;
        out.push(current.clone());
        current[var] = 0;
        return;
    }
    for v in (0..=remaining).rev() {
        current[var] = v as u8;
        push_compositions(remaining - v, var + 1, current, out);
    }
    current[var] = 0;
}

/// Truncated Taylor expansion of a scalar function about a base point.
#[derive(Clone)]
pub struct Jet {
    basis: Arc<MonomialBasis>,
    order: usize,
    coeffs: Vec<Scalar>,
}

impl std::fmt::Debug for Jet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Jet")
            .field("order", &self.order)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl Jet {
    pub fn constant(basis: &Arc<MonomialBasis>, order: usize, value: Scalar) -> Jet {
        let mut coeffs = vec![Scalar::zero(); basis.size(order)];
        coeffs[0] = value;
        Jet {
            basis: basis.clone(),
            order,
            coeffs,
        }
    }

    pub fn zero(basis: &Arc<MonomialBasis>, order: usize) -> Jet {
        Jet::constant(basis, order, Scalar::zero())
    }

    /// The coordinate function `x_var` expanded about `value`.
    pub fn variable(basis: &Arc<MonomialBasis>, order: usize, var: usize, value: Scalar) -> Jet {
        let mut j = Jet::constant(basis, order, value);
        if order >= 1 {
            // degree-1 monomials follow the constant, ordered x_0, x_1, ...
            j.coeffs[1 + var] = Scalar::one();
        }
        j
    }

    pub fn from_coeffs(basis: &Arc<MonomialBasis>, order: usize, coeffs: Vec<Scalar>) -> Jet {
        assert_eq!(coeffs.len(), basis.size(order));
        Jet {
            basis: basis.clone(),
            order,
            coeffs,
        }
    }

    pub fn basis(&self) -> &Arc<MonomialBasis> {
        &self.basis
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn value(&self) -> &Scalar {
        &self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    pub fn truncate(&self, order: usize) -> Jet {
        let order = order.min(self.order);
        Jet {
            basis: self.basis.clone(),
            order,
            coeffs: self.coeffs[..self.basis.size(order)].to_vec(),
        }
    }

    fn larger_basis(&self, other: &Jet) -> Arc<MonomialBasis> {
        if self.basis.max_order >= other.basis.max_order {
            self.basis.clone()
        } else {
            other.basis.clone()
        }
    }

    pub fn add(&self, other: &Jet) -> Jet {
        let order = self.order.min(other.order);
        let basis = self.larger_basis(other);
        let coeffs = (0..basis.size(order))
            .map(|k| &self.coeffs[k] + &other.coeffs[k])
            .collect();
        Jet { basis, order, coeffs }
    }

    pub fn sub(&self, other: &Jet) -> Jet {
        let order = self.order.min(other.order);
        let basis = self.larger_basis(other);
        let coeffs = (0..basis.size(order))
            .map(|k| &self.coeffs[k] - &other.coeffs[k])
            .collect();
        Jet { basis, order, coeffs }
    }

    pub fn neg(&self) -> Jet {
        Jet {
            basis: self.basis.clone(),
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> Jet {
        Jet {
            basis: self.basis.clone(),
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn mul(&self, other: &Jet) -> Jet {
        let order = self.order.min(other.order);
        let basis = self.larger_basis(other);
        let mut coeffs = vec![Scalar::zero(); basis.size(order)];
        for &(i, j, k) in basis.products(order) {
            let (a, b) = (&self.coeffs[i as usize], &other.coeffs[j as usize]);
            if a.is_zero() || b.is_zero() {
                continue;
            }
            coeffs[k as usize] = &coeffs[k as usize] + &(a * b);
        }
        Jet { basis, order, coeffs }
    }

    /// `self += a * b`, in place.
    pub fn add_product(&mut self, a: &Jet, b: &Jet) {
        let order = self.order.min(a.order).min(b.order);
        if self.basis.max_order < order {
            self.basis = a.larger_basis(b);
        }
        self.order = order;
        self.coeffs.truncate(self.basis.size(order));
        let basis = self.basis.clone();
        for &(i, j, k) in basis.products(order) {
            let (x, y) = (&a.coeffs[i as usize], &b.coeffs[j as usize]);
            if x.is_zero() || y.is_zero() {
                continue;
            }
            self.coeffs[k as usize] = &self.coeffs[k as usize] + &(x * y);
        }
    }

    /// Partial derivative; the result has order one less.
    pub fn derivative(&self, var: usize) -> Jet {
        assert!(self.order >= 1, "derivative of an order-0 jet is undetermined");
        let order = self.order - 1;
        let size = self.basis.size(order);
        let mut coeffs = vec![Scalar::zero(); size];
        for (k, entry) in self.basis.lower[var][..self.basis.size(self.order)]
            .iter()
            .enumerate()
        {
            if let Some((target, e)) = entry {
                if *target < size {
                    coeffs[*target] = &self.coeffs[k] * &Scalar::int(*e as i64);
                }
            }
        }
        Jet {
            basis: self.basis.clone(),
            order,
            coeffs,
        }
    }

    /// `Σ_k series[k] * (self - self(0))^k`, i.e. composition with a
    /// univariate function whose Taylor coefficients at `self(0)` are `series`.
    fn compose(&self, series: &[Scalar]) -> Jet {
        let mut u = self.clone();
        u.coeffs[0] = Scalar::zero();
        let mut result = Jet::constant(&self.basis, self.order, series[0].clone());
        let mut power = Jet::constant(&self.basis, self.order, Scalar::one());
        for c in series.iter().skip(1) {
            power = power.mul(&u);
            if !c.is_zero() {
                result = result.add(&power.scale(c));
            }
        }
        result
    }

    pub fn recip(&self) -> Result<Jet> {
        let a = self.value();
        if a.is_zero() {
            return Err(Error::Domain("division by zero".into()));
        }
        let inv = a.recip()?;
        let mut series = Vec::with_capacity(self.order + 1);
        let mut term = inv.clone();
        for _ in 0..=self.order {
            series.push(term.clone());
            term = -(&term * &inv);
        }
        Ok(self.compose(&series))
    }

    pub fn div(&self, other: &Jet) -> Result<Jet> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn powi(&self, k: i32) -> Result<Jet> {
        if k < 0 {
            return self.recip()?.powi(-k);
        }
        let mut result = Jet::constant(&self.basis, self.order, Scalar::one());
        let mut base = self.clone();
        let mut e = k as u32;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(result)
    }

    pub fn exp(&self) -> Jet {
        let ea = self.value().exp();
        let mut series = Vec::with_capacity(self.order + 1);
        let mut fact = Scalar::one();
        for k in 0..=self.order {
            if k > 0 {
                fact = &fact * &Scalar::int(k as i64);
            }
            series.push(ea.checked_div(&fact).expect("factorial is nonzero"));
        }
        self.compose(&series)
    }

    fn sin_cos_series(&self, cosine: bool) -> Vec<Scalar> {
        let (s, c) = (self.value().sin(), self.value().cos());
        // derivatives of sin cycle through sin, cos, -sin, -cos
        let cycle = if cosine {
            [c.clone(), -&s, -&c, s.clone()]
        } else {
            [s.clone(), c.clone(), -&s, -&c]
        };
        let mut fact = Scalar::one();
        (0..=self.order)
            .map(|k| {
                if k > 0 {
                    fact = &fact * &Scalar::int(k as i64);
                }
                cycle[k % 4].checked_div(&fact).expect("factorial is nonzero")
            })
            .collect()
    }

    pub fn sin(&self) -> Jet {
        self.compose(&self.sin_cos_series(false))
    }

    pub fn cos(&self) -> Jet {
        self.compose(&self.sin_cos_series(true))
    }

    pub fn ln(&self) -> Result<Jet> {
        let a = self.value();
        let mut series = vec![a.ln()?];
        let inv = a.recip()?;
        let mut power = inv.clone();
        for k in 1..=self.order {
            let sign = if k % 2 == 1 { 1 } else { -1 };
            series.push((&power * &Scalar::ratio(sign, k as i64)).clone());
            power = &power * &inv;
        }
        Ok(self.compose(&series))
    }

    pub fn sqrt(&self) -> Result<Jet> {
        let a = self.value();
        let root = a.sqrt()?;
        if a.is_zero() && self.order > 0 {
            return Err(Error::Domain("sqrt is not differentiable at zero".into()));
        }
        let inv = if self.order > 0 { a.recip()? } else { Scalar::one() };
        // binomial(1/2, k) / a^k
        let mut series = Vec::with_capacity(self.order + 1);
        let mut coeff = root;
        for k in 0..=self.order {
            series.push(coeff.clone());
            let factor = Scalar::ratio(1 - 2 * k as i64, 2 * (k as i64 + 1));
            coeff = &(&coeff * &factor) * &inv;
        }
        Ok(self.compose(&series))
    }

    /// Value of `∂^α f(x)` for the multi-index `alpha`.
    pub fn partial(&self, alpha: &[u8]) -> Option<Scalar> {
        let k = self.basis.index_of(alpha)?;
        if k >= self.coeffs.len() {
            return None;
        }
        let fact: i64 = alpha.iter().map(|&a| (1..=a as i64).product::<i64>()).product();
        Some(&self.coeffs[k] * &Scalar::int(fact))
    }
}

/// Evaluation of expressions into jets about a base point.
pub struct JetDomain {
    basis: Arc<MonomialBasis>,
    order: usize,
    point: Vec<Scalar>,
}

impl JetDomain {
    pub fn new(point: &[Scalar], order: usize, mode: Mode) -> JetDomain {
        JetDomain {
            basis: MonomialBasis::get(point.len(), order),
            order,
            point: point.iter().map(|p| p.in_mode(mode)).collect(),
        }
    }

    pub fn basis(&self) -> &Arc<MonomialBasis> {
        &self.basis
    }

    /// Taylor expansion of `e` to this domain's order.
    pub fn expand(&self, e: &Expr) -> Result<Jet> {
        if let Some(v) = e.max_var() {
            if v >= self.point.len() {
                return Err(Error::ShapeMismatch(format!(
                    "expression uses coordinate {} but the point has {} entries",
                    v + 1,
                    self.point.len()
                )));
            }
        }
        evaluate_in(self, e)
    }
}

impl EvalDomain for JetDomain {
    type Value = Jet;

    fn constant(&self, c: &BigRational) -> Jet {
        let mode = if self.point.iter().all(Scalar::is_exact) {
            Mode::Exact
        } else {
            Mode::Float
        };
        Jet::constant(&self.basis, self.order, Scalar::Exact(c.clone()).in_mode(mode))
    }

    fn variable(&self, index: usize) -> Jet {
        Jet::variable(&self.basis, self.order, index, self.point[index].clone())
    }

    fn add(&self, a: &Jet, b: &Jet) -> Jet {
        a.add(b)
    }

    fn sub(&self, a: &Jet, b: &Jet) -> Jet {
        a.sub(b)
    }

    fn mul(&self, a: &Jet, b: &Jet) -> Jet {
        a.mul(b)
    }

    fn neg(&self, a: &Jet) -> Jet {
        a.neg()
    }

    fn div(&self, a: &Jet, b: &Jet) -> Result<Jet> {
        a.div(b)
    }

    fn powi(&self, a: &Jet, k: i32) -> Result<Jet> {
        a.powi(k)
    }

    fn apply(&self, f: Func, a: &Jet) -> Result<Jet> {
        match f {
            Func::Sin => Ok(a.sin()),
            Func::Cos => Ok(a.cos()),
            Func::Exp => Ok(a.exp()),
            Func::Log => a.ln(),
            Func::Sqrt => a.sqrt(),
        }
    }
}
