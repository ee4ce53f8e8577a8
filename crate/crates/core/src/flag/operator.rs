//! The curvature operator `F` of the connection on W and its covariant
//! derivatives, as jets of linear maps out of the fibre.

use serde::Serialize;

use crate::jet::Jet;
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::tensor::{flat, Geometry};

use super::fibre::{fibre_dim, pair_index, pairs};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Slot {
    /// Antisymmetric index pair, stored for `a < b`.
    Form,
    /// Single covariant index.
    Co,
}

/// Jets of a field of linear maps `W -> (output tensor)`, with output slots
/// `slots` and the fibre index last.
#[derive(Debug, Clone)]
pub(crate) struct WField {
    n: usize,
    slots: Vec<Slot>,
    data: Vec<Jet>,
}

impl WField {
    fn slot_size(&self, s: Slot) -> usize {
        match s {
            Slot::Form => self.n * (self.n - 1) / 2,
            Slot::Co => self.n,
        }
    }

    fn out_len(&self) -> usize {
        self.slots.iter().map(|&s| self.slot_size(s)).product()
    }

    fn out_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.slots)
            .fold(0, |acc, (&i, &s)| acc * self.slot_size(s) + i)
    }

    fn out_unflat(&self, mut k: usize) -> Vec<usize> {
        let mut idx = vec![0; self.slots.len()];
        for (slot, &s) in idx.iter_mut().zip(&self.slots).rev() {
            let size = self.slot_size(s);
            *slot = k % size;
            k /= size;
        }
        idx
    }

    fn at(&self, out: usize, a: usize) -> &Jet {
        &self.data[out * fibre_dim(self.n) + a]
    }

    /// Values at the base point: one row per output component.
    pub fn matrix(&self) -> Matrix {
        let nn = fibre_dim(self.n);
        (0..self.out_len())
            .map(|o| (0..nn).map(|a| self.at(o, a).value().clone()).collect())
            .collect()
    }
}

/// `Γ^B_{mA}`: component `B` of `∇_m e_A` for the coordinate basis
/// `e_A = dx^1, …, dx^n, dx^p∧dx^q (p<q)`. Indexed `[m][B][A]`.
pub(crate) fn connection_coefficients(geo: &Geometry) -> Vec<Vec<Vec<Jet>>> {
    let n = geo.dim();
    let nn = fibre_dim(n);
    let pr = pairs(n);
    let basis = geo.riemann_jets()[0].basis().clone();
    let order = geo.jet_order() - 2;
    let zero = Jet::zero(&basis, order);
    let r = geo.riemann_jets();
    let ginv = geo.inverse_jets();
    let delta = |a: usize, b: usize| a == b;
    let mut out = vec![vec![vec![zero.clone(); nn]; nn]; n];
    for m in 0..n {
        for s in 0..n {
            for a in 0..n {
                out[m][a][s] = geo.gamma(s, m, a).neg();
            }
            for (u, &(a, b)) in pr.iter().enumerate() {
                let mut acc = zero.clone();
                for e in 0..n {
                    let re = &r[flat(&[a, b, m, e], n)];
                    if !re.is_zero() {
                        acc.add_product(re, &ginv[e * n + s]);
                    }
                }
                out[m][n + u][s] = acc.neg();
            }
        }
        for (v, &(p, q)) in pr.iter().enumerate() {
            let col = n + v;
            for a in 0..n {
                let val = i64::from(delta(a, p) && delta(m, q)) - i64::from(delta(a, q) && delta(m, p));
                if val != 0 {
                    out[m][a][col] = Jet::constant(&basis, order, Scalar::int(-val));
                }
            }
            for (u, &(a, b)) in pr.iter().enumerate() {
                let mut acc = zero.clone();
                if b == q {
                    acc = acc.add(geo.gamma(p, m, a));
                }
                if b == p {
                    acc = acc.sub(geo.gamma(q, m, a));
                }
                if a == p {
                    acc = acc.add(geo.gamma(q, m, b));
                }
                if a == q {
                    acc = acc.sub(geo.gamma(p, m, b));
                }
                out[m][n + u][col] = acc.neg();
            }
        }
    }
    out
}

/// `F(X)_{ijkl} = R_{ijkl;s} g^{st} K_t + (R⋆L)_{ijkl}` as a field of maps
/// `W -> Λ² ⊗ Λ²`, rows `(i<j, k<l)`.
pub(crate) fn curvature_field(geo: &Geometry) -> WField {
    let n = geo.dim();
    let nn = fibre_dim(n);
    let pr = pairs(n);
    let basis = geo.riemann_jets()[0].basis().clone();
    let r = geo.riemann_jets();
    let dr = geo.covariant_derivative(r, 4);
    let ginv = geo.inverse_jets();
    let order = geo.jet_order() - 3;
    let zero = Jet::zero(&basis, order);
    let mut data = Vec::with_capacity(pr.len() * pr.len() * nn);
    for &(i, j) in &pr {
        for &(k, l) in &pr {
            let idx = [i, j, k, l];
            for t in 0..n {
                let mut acc = zero.clone();
                for s in 0..n {
                    let mut f = idx.to_vec();
                    f.push(s);
                    let d = &dr[flat(&f, n)];
                    if !d.is_zero() {
                        acc.add_product(d, &ginv[s * n + t]);
                    }
                }
                data.push(acc);
            }
            for &(p, q) in &pr {
                // E^s_u = g^{sp} δ_{uq} - g^{sq} δ_{up}
                let mut acc = zero.clone();
                for slot in 0..4 {
                    let u = idx[slot];
                    let (col, sign) = if u == q {
                        (p, 1)
                    } else if u == p {
                        (q, -1)
                    } else {
                        continue;
                    };
                    for s in 0..n {
                        let mut ri = idx;
                        ri[slot] = s;
                        let rv = &r[flat(&ri, n)];
                        let gv = &ginv[s * n + col];
                        if rv.is_zero() || gv.is_zero() {
                            continue;
                        }
                        if sign > 0 {
                            acc.add_product(rv, gv);
                        } else {
                            acc.add_product(rv, &gv.neg());
                        }
                    }
                }
                data.push(acc);
            }
        }
    }
    WField {
        n,
        slots: vec![Slot::Form, Slot::Form],
        data,
    }
}

/// `(∇_m F)_A = D_m F_A - F_B Γ^B_{mA}`, with `D` the Levi-Civita derivative
/// on the output slots; the new index `m` is appended last.
pub(crate) fn covariant_derivative(field: &WField, geo: &Geometry, conn: &[Vec<Vec<Jet>>]) -> WField {
    let n = field.n;
    let nn = fibre_dim(n);
    let mut slots = field.slots.clone();
    slots.push(Slot::Co);
    let out_len = field.out_len();
    let mut data = Vec::with_capacity(out_len * n * nn);
    for o in 0..out_len {
        let idx = field.out_unflat(o);
        for m in 0..n {
            for a in 0..nn {
                let mut acc = field.at(o, a).derivative(m);
                for (pos, &slot) in field.slots.iter().enumerate() {
                    match slot {
                        Slot::Co => {
                            let c = idx[pos];
                            let mut j = idx.clone();
                            for p in 0..n {
                                let gam = geo.gamma(p, m, c);
                                j[pos] = p;
                                let f = field.at(field.out_index(&j), a);
                                if !gam.is_zero() && !f.is_zero() {
                                    acc.add_product(&gam.neg(), f);
                                }
                            }
                        }
                        Slot::Form => {
                            let (b0, b1) = pairs(n)[idx[pos]];
                            let mut j = idx.clone();
                            for p in 0..n {
                                // Γ^p_{m b0} F_{..(p b1)..} + Γ^p_{m b1} F_{..(b0 p)..}
                                for (gam, pair) in [(geo.gamma(p, m, b0), (p, b1)), (geo.gamma(p, m, b1), (b0, p))] {
                                    if gam.is_zero() {
                                        continue;
                                    }
                                    let Some((u, sign)) = pair_index(n, pair.0, pair.1) else {
                                        continue;
                                    };
                                    j[pos] = u;
                                    let f = field.at(field.out_index(&j), a);
                                    if f.is_zero() {
                                        continue;
                                    }
                                    if sign > 0 {
                                        acc.add_product(&gam.neg(), f);
                                    } else {
                                        acc.add_product(gam, f);
                                    }
                                }
                            }
                        }
                    }
                }
                for b in 0..nn {
                    let c = &conn[m][b][a];
                    let f = field.at(o, b);
                    if !c.is_zero() && !f.is_zero() {
                        acc.add_product(&c.neg(), f);
                    }
                }
                data.push(acc);
            }
        }
    }
    WField { n, slots, data }
}

/// Pointwise matrix of `F` with its K- and L-blocks.
#[derive(Debug, Clone, Serialize)]
pub struct CurvatureOperator {
    pub dim: usize,
    /// Row labels `(i, j, k, l)` with `i<j`, `k<l`.
    pub rows: Vec<[usize; 4]>,
    /// `rows x n(n+1)/2`; the first `n` columns act on `K`.
    #[serde(skip)]
    pub matrix: Matrix,
}

impl CurvatureOperator {
    pub(crate) fn from_field(field: &WField) -> CurvatureOperator {
        let n = field.n;
        let pr = pairs(n);
        let rows = pr
            .iter()
            .flat_map(|&(i, j)| pr.iter().map(move |&(k, l)| [i, j, k, l]))
            .collect();
        CurvatureOperator {
            dim: n,
            rows,
            matrix: field.matrix(),
        }
    }

    /// Columns acting on `K`: entries `R_{ijkl;s} g^{st}`.
    pub fn k_block(&self) -> Matrix {
        self.matrix.iter().map(|r| r[..self.dim].to_vec()).collect()
    }

    /// Columns acting on `L`: entries of `R⋆E_{pq}`.
    pub fn l_block(&self) -> Matrix {
        self.matrix.iter().map(|r| r[self.dim..].to_vec()).collect()
    }
}
