//! The bracket on `V* ⊕ Λ²V*` built from a curvature-type tensor, the Lie
//! algebra it induces on a closed subspace, and its classification by
//! Killing form and derived series.

use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::flag::{fibre_dim, pairs, FlagResult, WElement};
use crate::linalg::{self, Matrix, Signature};
use crate::num::{serialize_scalar, Num};
use crate::scalar::Scalar;
use crate::tensor::{self, tensor_to_matrix, EvalOptions, MetricSpec, TensorValue, Variance};

/// Curvature tensor and inverse metric at a point, shared by repeated
/// bracket evaluations.
#[derive(Debug, Clone)]
pub struct BracketContext {
    n: usize,
    r: TensorValue,
    g: TensorValue,
    ginv: Matrix,
}

impl BracketContext {
    /// `r` is a covariant 4-tensor, `g` the covariant metric.
    pub fn new(r: &TensorValue, g: &TensorValue) -> Result<BracketContext> {
        let n = g.dim();
        if r.dim() != n || r.rank() != 4 || !r.is_covariant() || g.rank() != 2 || !g.is_covariant() {
            return Err(Error::ShapeMismatch(
                "bracket needs a covariant 4-tensor and a covariant metric of one dimension".into(),
            ));
        }
        let (ginv, _) = linalg::invert(&tensor_to_matrix(g), 1e-14)?;
        Ok(BracketContext {
            n,
            r: r.clone(),
            g: g.clone(),
            ginv,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn curvature(&self) -> &TensorValue {
        &self.r
    }

    pub fn metric(&self) -> &TensorValue {
        &self.g
    }

    fn check(&self, x: &WElement) -> Result<()> {
        if x.k.len() != self.n || x.l.len() != self.n * (self.n - 1) / 2 {
            return Err(Error::ShapeMismatch(format!(
                "fibre element of dimension {} in dimension {}",
                x.k.len(),
                self.n
            )));
        }
        Ok(())
    }

    fn raise(&self, k: &[Scalar]) -> Vec<Scalar> {
        linalg::mat_vec(&self.ginv, k)
    }

    fn full_l(&self, x: &WElement) -> Matrix {
        (0..self.n).map(|a| (0..self.n).map(|b| x.l_at(a, b)).collect()).collect()
    }

    /// `L_a^c` as a matrix.
    fn mixed_l(&self, l: &Matrix) -> Matrix {
        let n = self.n;
        (0..n)
            .map(|a| {
                (0..n)
                    .map(|c| (0..n).map(|b| &l[a][b] * &self.ginv[b][c]).sum())
                    .collect()
            })
            .collect()
    }

    /// `[K + L, K' + L'] = (L'_{ab}K^b - L_{ab}K'^b) + (L'_a^c L_{cb} - L_a^c L'_{cb} + R_{abcd}K^c K'^d)`.
    pub fn bracket(&self, x: &WElement, y: &WElement) -> Result<WElement> {
        self.check(x)?;
        self.check(y)?;
        let n = self.n;
        let ku = self.raise(&x.k);
        let kpu = self.raise(&y.k);
        let l = self.full_l(x);
        let lp = self.full_l(y);
        let lm = self.mixed_l(&l);
        let lpm = self.mixed_l(&lp);
        let mut out = WElement::zero(n);
        for a in 0..n {
            out.k[a] = (0..n).map(|b| &(&lp[a][b] * &ku[b]) - &(&l[a][b] * &kpu[b])).sum();
        }
        for (slot, &(a, b)) in pairs(n).iter().enumerate() {
            let mut acc = Scalar::zero();
            for c in 0..n {
                acc = &acc + &(&(&lpm[a][c] * &l[c][b]) - &(&lm[a][c] * &lp[c][b]));
            }
            for c in 0..n {
                if ku[c].is_zero() {
                    continue;
                }
                for d in 0..n {
                    let r = self.r.get(&[a, b, c, d]);
                    if r.is_zero() || kpu[d].is_zero() {
                        continue;
                    }
                    acc = &acc + &(&(r * &ku[c]) * &kpu[d]);
                }
            }
            out.l[slot] = acc;
        }
        Ok(out)
    }

    /// `[X,[Y,Z]] + [Y,[Z,X]] + [Z,[X,Y]]`.
    pub fn cyclic_sum(&self, x: &WElement, y: &WElement, z: &WElement) -> Result<WElement> {
        let a = self.bracket(x, &self.bracket(y, z)?)?;
        let b = self.bracket(y, &self.bracket(z, x)?)?;
        let c = self.bracket(z, &self.bracket(x, y)?)?;
        Ok(add(&add(&a, &b), &c))
    }

    /// `(B⋆L)_{abcd} K'^c K''^d + (B⋆L')_{abcd} K''^c K^d + (B⋆L'')_{abcd} K^c K'^d`
    /// as a 2-form, stored for `a < b`.
    pub fn star_expression(&self, x: &WElement, y: &WElement, z: &WElement) -> Result<Vec<Scalar>> {
        self.check(x)?;
        self.check(y)?;
        self.check(z)?;
        let n = self.n;
        let ginv = TensorValue::from_data(
            n,
            vec![Variance::Contra, Variance::Contra],
            self.ginv.iter().flatten().cloned().collect(),
        )?;
        let mut out = vec![Scalar::zero(); n * (n - 1) / 2];
        for (l_of, k1, k2) in [(x, y, z), (y, z, x), (z, x, y)] {
            let lt = TensorValue::from_fn(n, vec![Variance::Co; 2], |i| l_of.l_at(i[0], i[1]));
            let bl = tensor::star(&self.r, &lt, &ginv)?;
            let k1u = self.raise(&k1.k);
            let k2u = self.raise(&k2.k);
            for (slot, &(a, b)) in pairs(n).iter().enumerate() {
                let mut acc = Scalar::zero();
                for c in 0..n {
                    for d in 0..n {
                        let v = bl.get(&[a, b, c, d]);
                        if v.is_zero() {
                            continue;
                        }
                        acc = &acc + &(&(v * &k1u[c]) * &k2u[d]);
                    }
                }
                out[slot] = &out[slot] + &acc;
            }
        }
        Ok(out)
    }

    /// Fibre inner product: `g^{-1}` on `K` and the induced product
    /// `g^{ac}g^{bd} - g^{ad}g^{bc}` on `Λ²` (pairs `a<b`, `c<d`).
    pub fn fibre_gram(&self) -> Matrix {
        let n = self.n;
        let nn = fibre_dim(n);
        let pr = pairs(n);
        let mut m = vec![vec![Scalar::zero(); nn]; nn];
        for a in 0..n {
            for b in 0..n {
                m[a][b] = self.ginv[a][b].clone();
            }
        }
        for (u, &(a, b)) in pr.iter().enumerate() {
            for (v, &(c, d)) in pr.iter().enumerate() {
                m[n + u][n + v] = &(&self.ginv[a][c] * &self.ginv[b][d]) - &(&self.ginv[a][d] * &self.ginv[b][c]);
            }
        }
        m
    }
}

fn add(x: &WElement, y: &WElement) -> WElement {
    WElement {
        k: x.k.iter().zip(&y.k).map(|(a, b)| a + b).collect(),
        l: x.l.iter().zip(&y.l).map(|(a, b)| a + b).collect(),
    }
}

/// Eq.-by-eq. convenience wrapper around [`BracketContext::bracket`].
pub fn bracket(x: &WElement, y: &WElement, r: &TensorValue, g: &TensorValue) -> Result<WElement> {
    BracketContext::new(r, g)?.bracket(x, y)
}

fn max_abs(values: impl IntoIterator<Item = Scalar>) -> Scalar {
    let mut best = Scalar::zero();
    for v in values {
        let a = v.abs();
        if a.to_f64() > best.to_f64() || (best.is_zero() && !a.is_zero()) {
            best = a;
        }
    }
    best
}

/// Coefficients of `v` in the span of `basis` and the size of the part of
/// `v` left outside the span.
pub fn express(basis: &[Vec<Scalar>], v: &[Scalar]) -> (Vec<Scalar>, Scalar) {
    let d = basis.len();
    let len = v.len();
    if d == 0 {
        return (Vec::new(), max_abs(v.iter().cloned()));
    }
    let exact = linalg::all_exact(basis) && v.iter().all(Scalar::is_exact);
    let coeffs: Vec<Scalar> = if exact {
        // rows of [A | v] with A's columns the basis vectors
        let rows: Vec<Vec<BigRational>> = (0..len)
            .map(|i| {
                let mut r: Vec<BigRational> = basis.iter().map(|b| b[i].as_exact().expect("exact").clone()).collect();
                r.push(v[i].as_exact().expect("exact").clone());
                r
            })
            .collect();
        let (rref, pivots) = linalg::exact_rref(&rows, d + 1);
        let mut c = vec![BigRational::zero(); d];
        for (row, &p) in rref.iter().zip(&pivots) {
            if p < d {
                c[p] = row[d].clone();
            }
        }
        c.into_iter().map(Scalar::Exact).collect()
    } else {
        let a: Vec<Vec<f64>> = (0..len).map(|i| basis.iter().map(|b| b[i].to_f64()).collect()).collect();
        let b: Vec<f64> = v.iter().map(Scalar::to_f64).collect();
        let (c, _) = linalg::least_squares(&a, &b);
        let scale = c.iter().map(|x| x.abs()).fold(0.0, f64::max);
        c.into_iter().map(|x| Scalar::float_with_mag(x, scale)).collect()
    };
    let recon = linalg::combine(&coeffs, basis, len);
    let residual = max_abs(v.iter().zip(&recon).map(|(a, b)| a - b));
    (coeffs, residual)
}

/// Named isomorphism classes recognised from computed invariants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgebraLabel {
    Trivial,
    Abelian1d,
    EuclideanE2,
    /// Translations extended by `so(p,q)`, `p >= q`.
    SemidirectE { p: usize, q: usize },
    So3,
    Sl2R,
    OtherWithInvariants,
}

impl fmt::Display for AlgebraLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraLabel::Trivial => f.write_str("trivial"),
            AlgebraLabel::Abelian1d => f.write_str("abelian-1d"),
            AlgebraLabel::EuclideanE2 => f.write_str("euclidean-e(2)-type"),
            AlgebraLabel::SemidirectE { p, q: 0 } => write!(f, "semidirect-e({p})-type"),
            AlgebraLabel::SemidirectE { p, q } => write!(f, "semidirect-e({p},{q})-type"),
            AlgebraLabel::So3 => f.write_str("so(3)-type"),
            AlgebraLabel::Sl2R => f.write_str("sl(2,R)-type"),
            AlgebraLabel::OtherWithInvariants => f.write_str("other-with-invariants"),
        }
    }
}

impl Serialize for AlgebraLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Killing form with its signature.
#[derive(Debug, Clone, Serialize)]
pub struct KillingForm {
    #[serde(serialize_with = "serialize_matrix")]
    pub matrix: Matrix,
    pub signature: Signature,
}

fn serialize_matrix<S: Serializer>(m: &Matrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(m.iter().map(|r| r.iter().map(Num::from).collect::<Vec<_>>()))
}

fn serialize_constants<S: Serializer>(c: &[Vec<Vec<Scalar>>], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(
        c.iter()
            .map(|m| m.iter().map(|r| r.iter().map(Num::from).collect::<Vec<_>>()).collect::<Vec<_>>()),
    )
}

/// Lie algebra structure on a bracket-closed subspace of the fibre.
#[derive(Debug, Clone, Serialize)]
pub struct LieAlgebraResult {
    pub dim: usize,
    pub basis: Vec<WElement>,
    /// `structure_constants[i][j][k] = c^k_{ij}` with `[e_i, e_j] = c^k_{ij} e_k`.
    #[serde(serialize_with = "serialize_constants")]
    pub structure_constants: Vec<Vec<Vec<Scalar>>>,
    #[serde(serialize_with = "serialize_scalar")]
    pub closure_residual: Scalar,
    #[serde(serialize_with = "serialize_scalar")]
    pub jacobi_residual: Scalar,
    pub killing_form: KillingForm,
    /// Dimensions of `g, [g,g], [[g,g],[g,g]], …` until constant.
    pub derived_series: Vec<usize>,
    pub label: AlgebraLabel,
}

impl LieAlgebraResult {
    pub fn constant(&self, i: usize, j: usize, k: usize) -> &Scalar {
        &self.structure_constants[i][j][k]
    }
}

/// Relative size above which a bracket component outside the span counts
/// as a closure failure, in units of the rank tolerance.
const CLOSURE_FACTOR: f64 = 1e3;

/// Structure constants of the bracket restricted to `basis`. The result
/// carries an empty Killing form and `OtherWithInvariants` until
/// [`lie_algebra`] completes it.
pub fn structure_constants(basis: &[WElement], ctx: &BracketContext, tol: f64) -> Result<LieAlgebraResult> {
    let d = basis.len();
    let vecs: Vec<Vec<Scalar>> = basis.iter().map(WElement::to_vec).collect();
    if linalg::rank(&vecs, fibre_dim(ctx.dim()), tol) != d {
        return Err(Error::ShapeMismatch("basis vectors are linearly dependent".into()));
    }
    let mut c = vec![vec![vec![Scalar::zero(); d]; d]; d];
    let mut worst = Scalar::zero();
    for i in 0..d {
        for j in (i + 1)..d {
            let b = ctx.bracket(&basis[i], &basis[j])?;
            let (coeffs, residual) = express(&vecs, &b.to_vec());
            let scale = b.max_abs().max(1.0);
            if residual.to_f64() > CLOSURE_FACTOR * tol * scale || (residual.is_exact() && !residual.is_zero()) {
                return Err(Error::NotClosed {
                    i,
                    j,
                    residual: residual.to_f64(),
                });
            }
            if residual.to_f64() > worst.to_f64() || (worst.is_zero() && !residual.is_zero()) {
                worst = residual;
            }
            for (k, v) in coeffs.into_iter().enumerate() {
                c[j][i][k] = -&v;
                c[i][j][k] = v;
            }
        }
    }
    Ok(LieAlgebraResult {
        dim: d,
        basis: basis.to_vec(),
        structure_constants: c,
        closure_residual: worst,
        jacobi_residual: Scalar::zero(),
        killing_form: KillingForm {
            matrix: Vec::new(),
            signature: linalg::signature(&[], tol),
        },
        derived_series: Vec::new(),
        label: AlgebraLabel::OtherWithInvariants,
    })
}

/// Both sides of the Jacobi criterion over all basis triples.
#[derive(Debug, Clone, Serialize)]
pub struct JacobiCheck {
    /// Largest entry of a cyclic bracket sum.
    #[serde(serialize_with = "serialize_scalar")]
    pub cyclic: Scalar,
    /// Largest entry of the `⋆`-expression.
    #[serde(serialize_with = "serialize_scalar")]
    pub star: Scalar,
    /// Largest entrywise difference between the two.
    #[serde(serialize_with = "serialize_scalar")]
    pub discrepancy: Scalar,
}

/// Compares the cyclic sum for one triple with the `⋆`-expression: the
/// `K`-part of the sum must vanish and its `L`-part equal the expression.
pub fn jacobi_triple(ctx: &BracketContext, x: &WElement, y: &WElement, z: &WElement) -> Result<JacobiCheck> {
    let cyc = ctx.cyclic_sum(x, y, z)?;
    let star = ctx.star_expression(x, y, z)?;
    let discrepancy = max_abs(
        cyc.k
            .iter()
            .cloned()
            .chain(cyc.l.iter().zip(&star).map(|(a, b)| a - b)),
    );
    Ok(JacobiCheck {
        cyclic: max_abs(cyc.to_vec()),
        star: max_abs(star),
        discrepancy,
    })
}

/// Worst case of [`jacobi_triple`] over all basis triples.
pub fn jacobi_residual(basis: &[WElement], ctx: &BracketContext) -> Result<JacobiCheck> {
    let mut out = JacobiCheck {
        cyclic: Scalar::zero(),
        star: Scalar::zero(),
        discrepancy: Scalar::zero(),
    };
    let pick = |a: &Scalar, b: Scalar| if b.to_f64() > a.to_f64() || (a.is_zero() && !b.is_zero()) { b } else { a.clone() };
    for i in 0..basis.len() {
        for j in (i + 1)..basis.len() {
            for k in (j + 1)..basis.len() {
                let t = jacobi_triple(ctx, &basis[i], &basis[j], &basis[k])?;
                out.cyclic = pick(&out.cyclic, t.cyclic);
                out.star = pick(&out.star, t.star);
                out.discrepancy = pick(&out.discrepancy, t.discrepancy);
            }
        }
    }
    Ok(out)
}

/// `κ(e_i, e_j) = c^a_{ib} c^b_{ja}` and its signature.
pub fn killing_form(c: &[Vec<Vec<Scalar>>], tol: f64) -> KillingForm {
    let d = c.len();
    let matrix: Matrix = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let mut acc = Scalar::zero();
                    for a in 0..d {
                        for b in 0..d {
                            if c[i][b][a].is_zero() || c[j][a][b].is_zero() {
                                continue;
                            }
                            acc = &acc + &(&c[i][b][a] * &c[j][a][b]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let signature = linalg::signature(&matrix, tol);
    KillingForm { matrix, signature }
}

/// Bracket of two elements given by coefficient vectors.
fn coeff_bracket(c: &[Vec<Vec<Scalar>>], u: &[Scalar], v: &[Scalar]) -> Vec<Scalar> {
    let d = c.len();
    let mut out = vec![Scalar::zero(); d];
    for i in 0..d {
        if u[i].is_zero() {
            continue;
        }
        for j in 0..d {
            if v[j].is_zero() {
                continue;
            }
            let w = &u[i] * &v[j];
            for k in 0..d {
                if !c[i][j][k].is_zero() {
                    out[k] = &out[k] + &(&w * &c[i][j][k]);
                }
            }
        }
    }
    out
}

fn span_basis(vectors: Vec<Vec<Scalar>>, d: usize, tol: f64) -> Vec<Vec<Scalar>> {
    // row space via the kernel of the kernel
    let ker = linalg::kernel(&vectors, d, tol);
    if ker.basis.is_empty() {
        return identity(d);
    }
    linalg::kernel(&ker.basis, d, tol).basis
}

fn identity(d: usize) -> Vec<Vec<Scalar>> {
    (0..d)
        .map(|i| (0..d).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect())
        .collect()
}

fn derived(c: &[Vec<Vec<Scalar>>], s: &[Vec<Scalar>], tol: f64) -> Vec<Vec<Scalar>> {
    let d = c.len();
    let mut out = Vec::new();
    for i in 0..s.len() {
        for j in (i + 1)..s.len() {
            out.push(coeff_bracket(c, &s[i], &s[j]));
        }
    }
    if out.is_empty() || linalg::rank(&out, d, tol) == 0 {
        return Vec::new();
    }
    span_basis(out, d, tol)
}

/// Dimensions of the derived series, ending at the first repeat.
pub fn derived_series(c: &[Vec<Vec<Scalar>>], tol: f64) -> Vec<usize> {
    let d = c.len();
    let mut s = identity(d);
    let mut dims = vec![d];
    while !s.is_empty() {
        let next = derived(c, &s, tol);
        if next.len() == s.len() {
            break;
        }
        dims.push(next.len());
        s = next;
    }
    dims
}

/// Whether the span of `s` (coefficient vectors) is an abelian ideal.
fn is_abelian_ideal(c: &[Vec<Vec<Scalar>>], s: &[Vec<Scalar>], tol: f64) -> bool {
    let d = c.len();
    for u in s {
        for v in s {
            if coeff_bracket(c, u, v).iter().any(|x| !x.vanishes_rel(tol)) {
                return false;
            }
        }
    }
    for e in identity(d) {
        for u in s {
            let b = coeff_bracket(c, &e, u);
            let mut rows = s.to_vec();
            rows.push(b);
            if linalg::rank(&rows, d, tol) > s.len() {
                return false;
            }
        }
    }
    true
}

trait VanishesRel {
    fn vanishes_rel(&self, tol: f64) -> bool;
}

impl VanishesRel for Scalar {
    fn vanishes_rel(&self, tol: f64) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float { value, mag } => value.abs() <= tol * mag.max(1.0) * CLOSURE_FACTOR,
        }
    }
}

/// Label from the Killing form and derived series. Returns
/// [`Error::UnknownClass`] with the invariants when nothing matches.
pub fn classify_algebra(result: &LieAlgebraResult, tol: f64) -> Result<AlgebraLabel> {
    let d = result.dim;
    let sig = result.killing_form.signature;
    let series = &result.derived_series;
    match d {
        0 => return Ok(AlgebraLabel::Trivial),
        1 => return Ok(AlgebraLabel::Abelian1d),
        _ => {}
    }
    let c = &result.structure_constants;
    if d == 3 && sig.zero == 0 {
        if sig.negative == 3 {
            return Ok(AlgebraLabel::So3);
        }
        if sig.positive == 2 && sig.negative == 1 {
            return Ok(AlgebraLabel::Sl2R);
        }
    }
    // translations `R^n` as the radical of κ, extended by so(p,q)
    if let Some(n) = (2..=d).find(|n| n * (n + 1) / 2 == d) {
        let radical = linalg::kernel(&result.killing_form.matrix, d, tol).basis;
        let so_dim = n * (n - 1) / 2;
        if radical.len() == n && sig.rank() == so_dim && is_abelian_ideal(c, &radical, tol) {
            let fits = (0..=n / 2)
                .map(|q| (n - q, q))
                .find(|&(p, q)| sig.positive == p * q && sig.negative == so_dim - p * q);
            if let Some((p, q)) = fits {
                let abelian_derived = n > 2 || series.get(1) == Some(&2) && series.get(2) == Some(&0);
                if abelian_derived {
                    return Ok(if (p, q) == (2, 0) {
                        AlgebraLabel::EuclideanE2
                    } else {
                        AlgebraLabel::SemidirectE { p, q }
                    });
                }
            }
        }
    }
    Err(Error::UnknownClass(format!(
        "dim {d}, derived series {series:?}, Killing signature ({}, {}, {})",
        sig.positive, sig.negative, sig.zero
    )))
}

/// Conditions the basis: orthonormal in the fibre inner product for
/// Riemannian float input, rationally orthogonalised for exact input, and
/// orthonormal in coordinates when the metric is indefinite.
pub fn condition_basis(basis: &[WElement], ctx: &BracketContext, riemannian: bool) -> Vec<WElement> {
    let n = ctx.dim();
    let nn = fibre_dim(n);
    let vecs: Vec<Vec<Scalar>> = basis.iter().map(WElement::to_vec).collect();
    let gram = if riemannian { ctx.fibre_gram() } else { identity(nn) };
    let out: Vec<Vec<Scalar>> = if linalg::all_exact(&vecs) && linalg::all_exact(&gram) {
        orthogonalize_exact(&vecs, &gram)
    } else {
        let gf: Vec<Vec<f64>> = gram.iter().map(|r| r.iter().map(Scalar::to_f64).collect()).collect();
        let vf: Vec<Vec<f64>> = vecs.iter().map(|v| v.iter().map(Scalar::to_f64).collect()).collect();
        linalg::orthonormalize(&vf, &gf)
            .into_iter()
            .map(|v| v.into_iter().map(|x| Scalar::float_with_mag(x, 1.0)).collect())
            .collect()
    };
    out.iter().map(|v| WElement::from_vec(n, v).expect("fibre length")).collect()
}

fn orthogonalize_exact(vecs: &[Vec<Scalar>], gram: &Matrix) -> Vec<Vec<Scalar>> {
    let inner = |u: &[Scalar], v: &[Scalar]| -> Scalar {
        let gv = linalg::mat_vec(gram, v);
        u.iter().zip(&gv).map(|(a, b)| a * b).sum()
    };
    let mut out: Vec<(Vec<Scalar>, Scalar)> = Vec::new();
    for v in vecs {
        let mut w = v.clone();
        for (u, uu) in &out {
            let c = inner(u, &w).checked_div(uu).expect("nonzero norm");
            w = w.iter().zip(u).map(|(a, b)| a - &(&c * b)).collect();
        }
        let ww = inner(&w, &w);
        if ww.is_zero() {
            // null direction: keep the basis unconditioned
            return vecs.to_vec();
        }
        out.push((w, ww));
    }
    out.into_iter().map(|(w, _)| w).collect()
}

/// Full Lie algebra analysis of a basis at a point with curvature `ctx`.
pub fn analyze_basis(basis: &[WElement], ctx: &BracketContext, riemannian: bool, tol: f64) -> Result<LieAlgebraResult> {
    let basis = condition_basis(basis, ctx, riemannian);
    let mut result = structure_constants(&basis, ctx, tol)?;
    result.jacobi_residual = jacobi_residual(&basis, ctx)?.cyclic;
    result.killing_form = killing_form(&result.structure_constants, tol);
    result.derived_series = derived_series(&result.structure_constants, tol);
    result.label = classify_algebra(&result, tol).unwrap_or(AlgebraLabel::OtherWithInvariants);
    Ok(result)
}

/// The Lie algebra of local Killing fields at `x`, realised on the
/// terminal subspace of `flag`.
pub fn lie_algebra(m: &MetricSpec, x: &[Scalar], flag: &FlagResult, opts: &EvalOptions) -> Result<LieAlgebraResult> {
    let r = tensor::riemann(m, x, 0, opts)?.remove(0);
    let g = tensor::metric_tensor(m, x, opts)?;
    let ctx = BracketContext::new(&r, &g)?;
    analyze_basis(flag.terminal_basis(), &ctx, m.is_riemannian(), opts.tol)
}

#[cfg(test)]
mod tests;
