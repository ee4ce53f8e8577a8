//! Taylor jets of the metric and the curvature quantities derived from it.
//!
//! Every derivative in the pipeline is read off a truncated Taylor expansion
//! about the analysis point, so no symbolic expression growth occurs.

use crate::error::{Error, Result};
use crate::jet::{Jet, JetDomain};
use crate::scalar::{Mode, Scalar};

use super::MetricSpec;

/// Metric, inverse, Christoffel symbols and Riemann tensor as jets about a
/// point. With metric jets of order `m`, Christoffel jets have order `m-1`
/// and the Riemann jets order `m-2`.
#[derive(Debug, Clone)]
pub struct Geometry {
    dim: usize,
    point: Vec<Scalar>,
    jet_order: usize,
    g: Vec<Jet>,
    ginv: Vec<Jet>,
    /// `Γ^a_{bc}` at `a*n*n + b*n + c`.
    gamma: Vec<Jet>,
    /// `R_{abcd}` with all indices lowered.
    riemann: Vec<Jet>,
}

pub(crate) fn flat(idx: &[usize], n: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * n + i)
}

pub(crate) fn unflat(mut k: usize, n: usize, rank: usize) -> Vec<usize> {
    let mut idx = vec![0; rank];
    for slot in idx.iter_mut().rev() {
        *slot = k % n;
        k /= n;
    }
    idx
}

fn invert_jets(g: &[Jet], n: usize) -> Result<Vec<Jet>> {
    let basis = g[0].basis().clone();
    let order = g[0].order();
    let mut a: Vec<Vec<Jet>> = (0..n).map(|i| g[i * n..(i + 1) * n].to_vec()).collect();
    let mut inv: Vec<Vec<Jet>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Jet::constant(&basis, order, if i == j { Scalar::one() } else { Scalar::zero() }))
                .collect()
        })
        .collect();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| {
                a[i][c]
                    .value()
                    .to_f64()
                    .abs()
                    .total_cmp(&a[j][c].value().to_f64().abs())
            })
            .expect("nonempty");
        if a[p][c].value().is_zero() {
            return Err(Error::SingularMetric { determinant: 0.0 });
        }
        a.swap(p, c);
        inv.swap(p, c);
        let r = a[c][c].recip()?;
        for j in 0..n {
            a[c][j] = a[c][j].mul(&r);
            inv[c][j] = inv[c][j].mul(&r);
        }
        for i in 0..n {
            if i == c || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            for j in 0..n {
                a[i][j] = a[i][j].sub(&f.mul(&a[c][j]));
                inv[i][j] = inv[i][j].sub(&f.mul(&inv[c][j]));
            }
        }
    }
    Ok(inv.into_iter().flatten().collect())
}

impl Geometry {
    /// Expands the metric to order `jet_order` (at least 2) about `x`.
    /// The caller is expected to have validated invertibility and signature
    /// with [`MetricSpec::at_point`].
    pub fn new(metric: &MetricSpec, x: &[Scalar], mode: Mode, jet_order: usize) -> Result<Geometry> {
        metric.check_point(x)?;
        let n = metric.dim();
        let jet_order = jet_order.max(2);
        let domain = JetDomain::new(x, jet_order, mode);
        let mut g: Vec<Jet> = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                if b < a {
                    g.push(g[b * n + a].clone());
                } else {
                    g.push(domain.expand(metric.component(a, b))?);
                }
            }
        }
        let ginv = invert_jets(&g, n)?;
        // dg[(d*n + b)*n + c] = ∂_c g_{db}
        let mut dg: Vec<Jet> = Vec::with_capacity(n * n * n);
        for d in 0..n {
            for b in 0..n {
                for c in 0..n {
                    dg.push(g[d * n + b].derivative(c));
                }
            }
        }
        let basis = domain.basis().clone();
        let mut gamma: Vec<Jet> = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if c < b {
                        gamma.push(gamma[a * n * n + c * n + b].clone());
                        continue;
                    }
                    let mut acc = Jet::zero(&basis, jet_order - 1);
                    for d in 0..n {
                        // ∂_b g_{dc} + ∂_c g_{db} - ∂_d g_{bc}
                        let first = dg[(d * n + c) * n + b]
                            .add(&dg[(d * n + b) * n + c])
                            .sub(&dg[(b * n + c) * n + d]);
                        if first.is_zero() || ginv[a * n + d].is_zero() {
                            continue;
                        }
                        acc.add_product(&ginv[a * n + d], &first);
                    }
                    gamma.push(acc.scale(&Scalar::ratio(1, 2)));
                }
            }
        }
        let gm = |a: usize, b: usize, c: usize| &gamma[a * n * n + b * n + c];
        // R^a_{bcd} = ∂_c Γ^a_{db} - ∂_d Γ^a_{cb} + Γ^a_{ce} Γ^e_{db} - Γ^a_{de} Γ^e_{cb}
        let mut r_up = vec![Jet::zero(&basis, jet_order - 2); n * n * n * n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in (c + 1)..n {
                        let mut acc = gm(a, d, b).derivative(c).sub(&gm(a, c, b).derivative(d));
                        for e in 0..n {
                            if !gm(a, c, e).is_zero() && !gm(e, d, b).is_zero() {
                                acc.add_product(gm(a, c, e), gm(e, d, b));
                            }
                            if !gm(a, d, e).is_zero() && !gm(e, c, b).is_zero() {
                                acc.add_product(&gm(a, d, e).neg(), gm(e, c, b));
                            }
                        }
                        r_up[flat(&[a, b, d, c], n)] = acc.neg();
                        r_up[flat(&[a, b, c, d], n)] = acc;
                    }
                }
            }
        }
        let mut riemann = vec![Jet::zero(&basis, jet_order - 2); n * n * n * n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let mut acc = Jet::zero(&basis, jet_order - 2);
                        for e in 0..n {
                            let r = &r_up[flat(&[e, b, c, d], n)];
                            if !r.is_zero() {
                                acc.add_product(&g[a * n + e], r);
                            }
                        }
                        riemann[flat(&[a, b, c, d], n)] = acc;
                    }
                }
            }
        }
        Ok(Geometry {
            dim: n,
            point: x.iter().map(|s| s.in_mode(mode)).collect(),
            jet_order,
            g,
            ginv,
            gamma,
            riemann,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self) -> &[Scalar] {
        &self.point
    }

    pub fn jet_order(&self) -> usize {
        self.jet_order
    }

    pub fn metric_jets(&self) -> &[Jet] {
        &self.g
    }

    pub fn inverse_jets(&self) -> &[Jet] {
        &self.ginv
    }

    pub fn christoffel_jets(&self) -> &[Jet] {
        &self.gamma
    }

    pub fn riemann_jets(&self) -> &[Jet] {
        &self.riemann
    }

    pub fn gamma(&self, a: usize, b: usize, c: usize) -> &Jet {
        &self.gamma[(a * self.dim + b) * self.dim + c]
    }

    /// Levi-Civita covariant derivative of a covariant rank-`rank` tensor
    /// field given as jets; the derivative index is appended last. The
    /// result has jet order one less than the input.
    pub fn covariant_derivative(&self, t: &[Jet], rank: usize) -> Vec<Jet> {
        let n = self.dim;
        let len = n.pow(rank as u32);
        debug_assert_eq!(t.len(), len);
        let mut out = Vec::with_capacity(len * n);
        for (k, tk) in t.iter().enumerate() {
            let idx = unflat(k, n, rank);
            for s in 0..n {
                let mut acc = tk.derivative(s);
                for slot in 0..rank {
                    let mut j = idx.clone();
                    for p in 0..n {
                        let gam = self.gamma(p, s, idx[slot]);
                        j[slot] = p;
                        let tj = &t[flat(&j, n)];
                        if gam.is_zero() || tj.is_zero() {
                            continue;
                        }
                        acc.add_product(&gam.neg(), tj);
                    }
                }
                out.push(acc);
            }
        }
        out
    }

    /// `[R, ∇R, ..., ∇^k R]` as jets; requires `k <= jet_order - 2`.
    pub fn riemann_derivatives(&self, k: usize) -> Result<Vec<Vec<Jet>>> {
        if k + 2 > self.jet_order {
            return Err(Error::OrderCapExceeded {
                requested: k,
                cap: self.jet_order - 2,
            });
        }
        let mut out = vec![self.riemann.clone()];
        for r in 0..k {
            let next = self.covariant_derivative(&out[r], 4 + r);
            out.push(next);
        }
        Ok(out)
    }
}

/// Values at the base point.
pub fn values(jets: &[Jet]) -> Vec<Scalar> {
    jets.iter().map(|j| j.value().clone()).collect()
}
