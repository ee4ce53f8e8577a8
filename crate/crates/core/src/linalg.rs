//! Dense linear algebra over [`Scalar`]: kernels, ranks, inverses and
//! signatures. Exact inputs go through fraction-free elimination; anything
//! with a float entry is handled by singular-value thresholding.

use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type Matrix = Vec<Vec<Scalar>>;

/// Kernel of a matrix together with the rank decision that produced it.
#[derive(Debug, Clone)]
pub struct Kernel {
    /// Basis vectors of the null space, each of length `ncols`.
    pub basis: Vec<Vec<Scalar>>,
    pub rank: usize,
    pub exact: bool,
    /// Singular values of the row-scaled matrix (float path only).
    pub singular_values: Vec<f64>,
    /// Threshold below which singular values counted as zero.
    pub threshold: f64,
}

pub fn all_exact(rows: &[Vec<Scalar>]) -> bool {
    rows.iter().all(|r| r.iter().all(Scalar::is_exact))
}

/// Null space of `rows` (an `m x ncols` matrix).
pub fn kernel(rows: &[Vec<Scalar>], ncols: usize, tol: f64) -> Kernel {
    if all_exact(rows) {
        let exact: Vec<Vec<BigRational>> = rows
            .iter()
            .map(|r| r.iter().map(|s| s.as_exact().expect("exact").clone()).collect())
            .collect();
        let (basis, rank) = exact_kernel(&exact, ncols);
        Kernel {
            basis: basis
                .into_iter()
                .map(|v| v.into_iter().map(Scalar::Exact).collect())
                .collect(),
            rank,
            exact: true,
            singular_values: Vec::new(),
            threshold: 0.0,
        }
    } else {
        float_kernel(rows, ncols, tol)
    }
}

pub fn rank(rows: &[Vec<Scalar>], ncols: usize, tol: f64) -> usize {
    kernel(rows, ncols, tol).rank
}

fn to_integer_row(row: &[BigRational]) -> Vec<BigInt> {
    let lcm = row
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect()
}

/// Row echelon form by fraction-free (Bareiss) elimination over the
/// integers. Returns the nonzero echelon rows and their pivot columns.
pub fn fraction_free_echelon(rows: &[Vec<BigRational>], ncols: usize) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| to_integer_row(r))
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect();
    let nrows = m.len();
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let (top, bottom) = m.split_at_mut(r + 1);
        let pivot_row = &top[r];
        for row in bottom.iter_mut() {
            let factor = row[c].clone();
            for j in (c + 1)..ncols {
                let v = &pivot_row[c] * &row[j] - &factor * &pivot_row[j];
                row[j] = v / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

/// Reduced row echelon form over the rationals via the fraction-free echelon.
pub fn exact_rref(rows: &[Vec<BigRational>], ncols: usize) -> (Vec<Vec<BigRational>>, Vec<usize>) {
    let (echelon, pivots) = fraction_free_echelon(rows, ncols);
    let mut r: Vec<Vec<BigRational>> = echelon
        .into_iter()
        .map(|row| row.into_iter().map(BigRational::from_integer).collect())
        .collect();
    for (i, &c) in pivots.iter().enumerate().rev() {
        let p = r[i][c].clone();
        for x in r[i].iter_mut() {
            *x = &*x / &p;
        }
        for k in 0..i {
            let f = r[k][c].clone();
            if f.is_zero() {
                continue;
            }
            for j in c..ncols {
                let v = &r[i][j] * &f;
                r[k][j] = &r[k][j] - v;
            }
        }
    }
    (r, pivots)
}

/// Null-space basis with an identity block on the free columns.
pub fn exact_kernel(rows: &[Vec<BigRational>], ncols: usize) -> (Vec<Vec<BigRational>>, usize) {
    let (rref, pivots) = exact_rref(rows, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    let basis = free
        .iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); ncols];
            v[f] = BigRational::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -rref[i][f].clone();
            }
            v
        })
        .collect();
    (basis, pivots.len())
}

/// Null space by SVD. Each row is first scaled by the largest magnitude
/// estimate of its entries, so a row of cancelled noise stays at noise level
/// while genuine rows become O(1); singular values at most
/// `tol * max(sigma_max, 1)` are treated as zero.
pub fn float_kernel(rows: &[Vec<Scalar>], ncols: usize, tol: f64) -> Kernel {
    let mut data: Vec<f64> = Vec::new();
    let mut nrows = 0;
    for row in rows {
        let scale = row.iter().map(Scalar::mag).fold(0.0, f64::max);
        if scale == 0.0 || row.iter().all(Scalar::is_zero) {
            continue;
        }
        data.extend(row.iter().map(|s| s.to_f64() / scale));
        nrows += 1;
    }
    if nrows == 0 || ncols == 0 {
        return Kernel {
            basis: identity(ncols),
            rank: 0,
            exact: false,
            singular_values: Vec::new(),
            threshold: tol,
        };
    }
    let padded = nrows.max(ncols);
    data.resize(padded * ncols, 0.0);
    let a = DMatrix::from_row_slice(padded, ncols, &data);
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
    let sigma_max = sigma.iter().copied().fold(0.0, f64::max);
    let threshold = tol * sigma_max.max(1.0);
    let mut basis = Vec::new();
    let mut rank = 0;
    for (i, &s) in sigma.iter().enumerate() {
        if s > threshold {
            rank += 1;
        } else {
            basis.push((0..ncols).map(|j| Scalar::float_with_mag(v_t[(i, j)], 1.0)).collect());
        }
    }
    Kernel {
        basis,
        rank,
        exact: false,
        singular_values: sigma,
        threshold,
    }
}

fn identity(n: usize) -> Vec<Vec<Scalar>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Scalar::one() } else { Scalar::zero() })
                .collect()
        })
        .collect()
}

pub fn mat_vec(m: &[Vec<Scalar>], v: &[Scalar]) -> Vec<Scalar> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// Linear combination `Σ coeffs[i] * vectors[i]`.
pub fn combine(coeffs: &[Scalar], vectors: &[Vec<Scalar>], len: usize) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(); len];
    for (c, v) in coeffs.iter().zip(vectors) {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(v) {
            *o = &*o + &(c * x);
        }
    }
    out
}

/// Inverse and determinant by Gauss-Jordan elimination with partial
/// pivoting. Entries are exact when the input is.
pub fn invert(m: &[Vec<Scalar>], tol: f64) -> Result<(Matrix, Scalar)> {
    let n = m.len();
    let scale = m
        .iter()
        .flat_map(|r| r.iter().map(Scalar::mag))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut a: Matrix = m.to_vec();
    let mut inv = identity(n);
    let mut det = Scalar::one();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| a[i][c].to_f64().abs().total_cmp(&a[j][c].to_f64().abs()))
            .expect("nonempty");
        let pivot = a[p][c].clone();
        let negligible = match &pivot {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float { value, .. } => value.abs() <= tol * scale,
        };
        if negligible {
            return Err(Error::SingularMetric {
                determinant: (&det * &pivot).to_f64(),
            });
        }
        if p != c {
            a.swap(p, c);
            inv.swap(p, c);
            det = -det;
        }
        det = &det * &pivot;
        let pinv = pivot.recip()?;
        for j in 0..n {
            a[c][j] = &a[c][j] * &pinv;
            inv[c][j] = &inv[c][j] * &pinv;
        }
        for i in 0..n {
            if i == c || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            for j in 0..n {
                let v = &f * &a[c][j];
                a[i][j] = &a[i][j] - &v;
                let w = &f * &inv[c][j];
                inv[i][j] = &inv[i][j] - &w;
            }
        }
    }
    Ok((inv, det))
}

/// Counts of positive, negative and zero eigenvalues of a symmetric matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl Signature {
    pub fn rank(&self) -> usize {
        self.positive + self.negative
    }
}

/// Signature of a symmetric matrix. Exact input: characteristic polynomial
/// plus Descartes' rule (exact for real-rooted polynomials). Float input:
/// symmetric eigendecomposition with eigenvalues within `tol * max|λ|`
/// (at least `tol * max entry magnitude`) counted as zero.
pub fn signature(m: &[Vec<Scalar>], tol: f64) -> Signature {
    let n = m.len();
    if n == 0 {
        return Signature {
            positive: 0,
            negative: 0,
            zero: 0,
        };
    }
    if all_exact(m) {
        let a: Vec<Vec<BigRational>> = m
            .iter()
            .map(|r| r.iter().map(|s| s.as_exact().expect("exact").clone()).collect())
            .collect();
        return exact_signature(&a);
    }
    let eig = eigenvalues(m);
    let scale = m
        .iter()
        .flat_map(|r| r.iter().map(Scalar::mag))
        .fold(0.0, f64::max)
        .max(eig.iter().map(|v| v.abs()).fold(0.0, f64::max));
    let cut = tol * scale;
    let mut s = Signature {
        positive: 0,
        negative: 0,
        zero: 0,
    };
    for v in eig {
        if v > cut {
            s.positive += 1;
        } else if v < -cut {
            s.negative += 1;
        } else {
            s.zero += 1;
        }
    }
    s
}

/// Eigenvalues of a symmetric matrix (float), ascending.
pub fn eigenvalues(m: &[Vec<Scalar>]) -> Vec<f64> {
    let n = m.len();
    let a = DMatrix::from_fn(n, n, |i, j| 0.5 * (m[i][j].to_f64() + m[j][i].to_f64()));
    let mut v: Vec<f64> = SymmetricEigen::new(a).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Characteristic polynomial coefficients `c_0..c_n` of `det(λI - A)`,
/// by the Faddeev-LeVerrier recursion.
pub fn char_poly(a: &[Vec<BigRational>]) -> Vec<BigRational> {
    let n = a.len();
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut mk: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = BigRational::zero();
                for l in 0..n {
                    if !a[i][l].is_zero() && !mk[l][j].is_zero() {
                        s += &a[i][l] * &mk[l][j];
                    }
                }
                if i == j {
                    s += &coeffs[n - k + 1];
                }
                next[i][j] = s;
            }
        }
        mk = next;
        let mut tr = BigRational::zero();
        for i in 0..n {
            for l in 0..n {
                tr += &a[i][l] * &mk[l][i];
            }
        }
        coeffs[n - k] = -tr / BigRational::from_integer(BigInt::from(k as i64));
    }
    coeffs
}

fn sign_changes(coeffs: impl Iterator<Item = BigRational>) -> usize {
    let mut last: Option<bool> = None;
    let mut changes = 0;
    for c in coeffs {
        if c.is_zero() {
            continue;
        }
        let positive = c.is_positive();
        if last.is_some_and(|l| l != positive) {
            changes += 1;
        }
        last = Some(positive);
    }
    changes
}

pub fn exact_signature(a: &[Vec<BigRational>]) -> Signature {
    let p = char_poly(a);
    let zero = p.iter().take_while(|c| c.is_zero()).count();
    let positive = sign_changes(p.iter().cloned());
    let negative = sign_changes(
        p.iter()
            .enumerate()
            .map(|(k, c)| if k % 2 == 1 { -c.clone() } else { c.clone() }),
    );
    Signature {
        positive,
        negative,
        zero,
    }
}

/// Gram-Schmidt in the inner product `gram` (float). Vectors that become
/// negligible are dropped.
pub fn orthonormalize(vectors: &[Vec<f64>], gram: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let inner = |u: &[f64], v: &[f64]| -> f64 {
        let mut s = 0.0;
        for (i, ui) in u.iter().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                s += ui * gram[i][j] * vj;
            }
        }
        s
    };
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let norm0 = inner(v, v).abs().sqrt();
        let mut w = v.clone();
        // two passes for stability
        for _ in 0..2 {
            for u in &out {
                let c = inner(u, &w);
                for (wi, ui) in w.iter_mut().zip(u) {
                    *wi -= c * ui;
                }
            }
        }
        let norm = inner(&w, &w).abs().sqrt();
        if norm > 1e-12 * norm0.max(f64::MIN_POSITIVE) {
            out.push(w.iter().map(|x| x / norm).collect());
        }
    }
    out
}

/// Least-squares solution of `A x = b` (float) and the residual norm.
pub fn least_squares(a: &[Vec<f64>], b: &[f64]) -> (Vec<f64>, f64) {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    if m == 0 || n == 0 {
        return (vec![0.0; n], b.iter().map(|x| x * x).sum::<f64>().sqrt());
    }
    let am = DMatrix::from_fn(m, n, |i, j| a[i][j]);
    let bm = DMatrix::from_fn(m, 1, |i, _| b[i]);
    let svd = am.clone().svd(true, true);
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let x = svd
        .solve(&bm, 1e-13 * sigma_max.max(f64::MIN_POSITIVE))
        .unwrap_or_else(|_| DMatrix::zeros(n, 1));
    let r = &am * &x - &bm;
    ((0..n).map(|i| x[(i, 0)]).collect(), r.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    fn q(n: i64, d: i64) -> BigRational {
        rational(n, d)
    }

    #[test]
    fn exact_kernel_of_rank_two() {
        let rows = vec![
            vec![q(1, 1), q(2, 1), q(3, 1)],
            vec![q(2, 1), q(4, 1), q(6, 1)],
            vec![q(1, 2), q(0, 1), q(1, 1)],
        ];
        let (basis, rank) = exact_kernel(&rows, 3);
        assert_eq!(rank, 2);
        assert_eq!(basis.len(), 1);
        for row in &rows {
            let dot: BigRational = row.iter().zip(&basis[0]).map(|(a, b)| a * b).sum();
            assert!(dot.is_zero());
        }
    }

    #[test]
    fn fraction_free_matches_rational_rref() {
        let rows = vec![
            vec![q(0, 1), q(3, 7), q(1, 1), q(-2, 1)],
            vec![q(1, 3), q(1, 1), q(0, 1), q(5, 1)],
            vec![q(1, 3), q(10, 7), q(1, 1), q(3, 1)],
        ];
        let (rref, pivots) = exact_rref(&rows, 4);
        assert_eq!(pivots, vec![0, 1]);
        assert_eq!(rref[0][0], q(1, 1));
        assert_eq!(rref[1][1], q(1, 1));
        assert!(rref[0][1].is_zero());
    }

    #[test]
    fn noise_rows_do_not_count() {
        let noise = Scalar::Float {
            value: 3e-17,
            mag: 1.0,
        };
        let rows = vec![vec![noise.clone(), Scalar::float(0.0)], vec![Scalar::float(0.0), noise]];
        let k = kernel(&rows, 2, 1e-9);
        assert_eq!(k.rank, 0);
        assert_eq!(k.basis.len(), 2);
    }

    #[test]
    fn inverse_and_determinant() {
        let m = vec![
            vec![Scalar::int(2), Scalar::int(1)],
            vec![Scalar::int(1), Scalar::int(1)],
        ];
        let (inv, det) = invert(&m, 1e-12).unwrap();
        assert_eq!(det, Scalar::one());
        assert_eq!(inv[0][1], Scalar::int(-1));
        let s = vec![vec![Scalar::int(1), Scalar::int(0)], vec![Scalar::int(0), Scalar::int(0)]];
        assert!(matches!(invert(&s, 1e-12), Err(Error::SingularMetric { .. })));
    }

    #[test]
    fn signatures_agree_between_paths() {
        let m = vec![
            vec![q(2, 1), q(1, 1), q(0, 1)],
            vec![q(1, 1), q(-1, 1), q(0, 1)],
            vec![q(0, 1), q(0, 1), q(0, 1)],
        ];
        let s = exact_signature(&m);
        assert_eq!((s.positive, s.negative, s.zero), (1, 1, 1));
        let f: Matrix = m
            .iter()
            .map(|r| r.iter().map(|x| Scalar::Exact(x.clone()).to_float()).collect())
            .collect();
        assert_eq!(signature(&f, 1e-9), s);
    }

    #[test]
    fn gram_schmidt_in_weighted_product() {
        let g = vec![vec![4.0, 0.0], vec![0.0, 1.0]];
        let o = orthonormalize(&[vec![1.0, 1.0], vec![1.0, 0.0]], &g);
        assert_eq!(o.len(), 2);
        let ip = |u: &[f64], v: &[f64]| 4.0 * u[0] * v[0] + u[1] * v[1];
        assert!((ip(&o[0], &o[0]) - 1.0).abs() < 1e-12);
        assert!(ip(&o[0], &o[1]).abs() < 1e-12);
    }
}
