use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::jet::JetDomain;
use crate::scalar::{Mode, Scalar};
use crate::tensor::{ChristoffelValue, Geometry, MetricSpec, TensorValue};

/// Index pairs `(a, b)` with `a < b`, in lexicographic order.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for a in 0..n {
        for b in (a + 1)..n {
            out.push((a, b));
        }
    }
    out
}

/// Position of the pair `{a, b}` in [`pairs`] and the sign relating
/// `L_{ab}` to the stored component; `None` on the diagonal.
pub fn pair_index(n: usize, a: usize, b: usize) -> Option<(usize, i8)> {
    use std::cmp::Ordering::*;
    let (lo, hi, sign) = match a.cmp(&b) {
        Less => (a, b, 1),
        Greater => (b, a, -1),
        Equal => return None,
    };
    // pairs before row `lo`: lo*n - lo*(lo+1)/2
    Some((lo * n - lo * (lo + 1) / 2 + (hi - lo - 1), sign))
}

/// Fibre dimension `n(n+1)/2`.
pub fn fibre_dim(n: usize) -> usize {
    n * (n + 1) / 2
}

/// An element `K + L` of the fibre `T*M ⊕ Λ²T*M`. `L` stores the
/// antisymmetric components `L_{ab}` for `a < b`, so that
/// `L = L_{ab} dx^a ∧ dx^b` summed over all `a, b`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WElement {
    #[serde(serialize_with = "crate::num::serialize_scalars")]
    pub k: Vec<Scalar>,
    #[serde(serialize_with = "crate::num::serialize_scalars")]
    pub l: Vec<Scalar>,
}

impl WElement {
    pub fn zero(n: usize) -> WElement {
        WElement {
            k: vec![Scalar::zero(); n],
            l: vec![Scalar::zero(); n * (n - 1) / 2],
        }
    }

    pub fn dim(&self) -> usize {
        self.k.len()
    }

    /// Coordinates in the basis `dx^1, …, dx^n, dx^a∧dx^b (a<b)`.
    pub fn to_vec(&self) -> Vec<Scalar> {
        self.k.iter().chain(&self.l).cloned().collect()
    }

    pub fn from_vec(n: usize, v: &[Scalar]) -> Result<WElement> {
        if v.len() != fibre_dim(n) {
            return Err(Error::ShapeMismatch(format!(
                "fibre vector of length {} for dimension {n}",
                v.len()
            )));
        }
        Ok(WElement {
            k: v[..n].to_vec(),
            l: v[n..].to_vec(),
        })
    }

    /// Full antisymmetric component `L_{ab}`.
    pub fn l_at(&self, a: usize, b: usize) -> Scalar {
        match pair_index(self.dim(), a, b) {
            None => Scalar::zero(),
            Some((i, 1)) => self.l[i].clone(),
            Some((i, _)) => -&self.l[i],
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.k
            .iter()
            .chain(&self.l)
            .map(|s| s.to_f64().abs())
            .fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &WElement) -> WElement {
        WElement {
            k: self.k.iter().zip(&other.k).map(|(a, b)| a - b).collect(),
            l: self.l.iter().zip(&other.l).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Value and first partial derivatives of a W-valued section at a point.
#[derive(Debug, Clone)]
pub struct SectionJet {
    pub value: WElement,
    /// `partials[i]` holds `∂_i K_a` and `∂_i L_{ab}`.
    pub partials: Vec<WElement>,
}

/// `∇_i X = (K_{a;i} - L_{ai}) dx^a + (L_{ab;i} - R_{abi}^c K_c) dx^a∧dx^b`
/// for each coordinate direction `i`.
pub fn connection_apply(
    section: &SectionJet,
    gamma: &ChristoffelValue,
    riemann: &TensorValue,
    ginv: &TensorValue,
) -> Result<Vec<WElement>> {
    let n = section.value.dim();
    if section.partials.len() != n || gamma.dim() != n || riemann.dim() != n || ginv.dim() != n {
        return Err(Error::ShapeMismatch("section jet and geometry dimensions differ".into()));
    }
    let x = &section.value;
    let pr = pairs(n);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let d = &section.partials[i];
        let mut w = WElement::zero(n);
        for a in 0..n {
            let mut kai = d.k[a].clone();
            for p in 0..n {
                kai = &kai - &(gamma.get(p, i, a) * &x.k[p]);
            }
            w.k[a] = &kai - &x.l_at(a, i);
        }
        for (slot, &(a, b)) in pr.iter().enumerate() {
            let mut labi = d.l[slot].clone();
            for p in 0..n {
                labi = &labi - &(gamma.get(p, i, a) * &x.l_at(p, b));
                labi = &labi - &(gamma.get(p, i, b) * &x.l_at(a, p));
            }
            for c in 0..n {
                for e in 0..n {
                    let r = riemann.get(&[a, b, i, e]);
                    if r.is_zero() {
                        continue;
                    }
                    labi = &labi - &(&(r * ginv.get(&[e, c])) * &x.k[c]);
                }
            }
            w.l[slot] = labi;
        }
        out.push(w);
    }
    Ok(out)
}

/// Section jet of `K_a = g_{ab} ξ^b`, `L_{ab} = K_{a;b}` for a vector field
/// `ξ` given by coordinate expressions. For a Killing field this is the
/// parallel section associated with it.
pub fn killing_section(metric: &MetricSpec, xi: &[Expr], x: &[Scalar], mode: Mode) -> Result<SectionJet> {
    let n = metric.dim();
    if xi.len() != n {
        return Err(Error::ShapeMismatch(format!("vector field with {} components in dimension {n}", xi.len())));
    }
    let geo = Geometry::new(metric, x, mode, 3)?;
    let dom = JetDomain::new(x, 3, mode);
    let xi_j = xi.iter().map(|e| dom.expand(e)).collect::<Result<Vec<_>>>()?;
    let g = geo.metric_jets();
    let k: Vec<_> = (0..n)
        .map(|a| {
            let mut acc = crate::jet::Jet::zero(dom.basis(), 3);
            for b in 0..n {
                acc.add_product(&g[a * n + b], &xi_j[b]);
            }
            acc
        })
        .collect();
    // dk[a*n + b] = K_{a;b}
    let dk = geo.covariant_derivative(&k, 1);
    let pr = pairs(n);
    let value = WElement {
        k: k.iter().map(|j| j.value().clone()).collect(),
        l: pr.iter().map(|&(a, b)| dk[a * n + b].value().clone()).collect(),
    };
    let partials = (0..n)
        .map(|i| WElement {
            k: k.iter().map(|j| j.derivative(i).value().clone()).collect(),
            l: pr.iter().map(|&(a, b)| dk[a * n + b].derivative(i).value().clone()).collect(),
        })
        .collect();
    Ok(SectionJet { value, partials })
}
