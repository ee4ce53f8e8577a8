//! The fibre `W_x = T*_x M ⊕ Λ²T*_x M`, the curvature operator of its
//! connection, and the derived flag terminating in the subspace whose
//! dimension counts local Killing fields.
//!
//! Level `k` of the flag is the kernel of `[F; ∇F; …; ∇^k F]` at the point,
//! computed inside the previous level so that the subspaces are nested.
//! Iteration stops at the first repeated rank, or when the rank reaches the
//! full fibre or zero.

mod fibre;
mod operator;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use fibre::{connection_apply, fibre_dim, killing_section, pair_index, pairs, SectionJet, WElement};
pub use operator::CurvatureOperator;

use crate::error::{Error, Result, Warning};
use crate::linalg::{self, all_exact};
use crate::scalar::Scalar;
use crate::tensor::{EvalOptions, Geometry, MetricSpec};

/// Knobs for [`derived_flag`].
#[derive(Debug, Clone, PartialEq)]
pub struct FlagConfig {
    pub eval: EvalOptions,
    /// Number of perturbed probe points; 0 disables probing.
    pub probes: usize,
    pub probe_radius: Scalar,
    pub probe_seed: u64,
}

impl Default for FlagConfig {
    fn default() -> Self {
        FlagConfig {
            eval: EvalOptions::default(),
            probes: 4,
            probe_radius: Scalar::ratio(1, 100),
            probe_seed: 0x6b69_6c6c,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeSample {
    pub point: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ranks: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

/// Flag rank sequences at perturbed points around the analysis point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityWitness {
    pub reference: Vec<usize>,
    pub radius: f64,
    pub samples: Vec<ProbeSample>,
    /// True when every evaluated probe reproduced the reference ranks.
    pub agree: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FlagResult {
    pub dim: usize,
    pub ranks: Vec<usize>,
    /// Basis of each level; exact levels are in reduced row echelon form,
    /// float levels orthonormal in coordinates.
    pub bases: Vec<Vec<WElement>>,
    pub terminal_rank: usize,
    /// Index of the level at which the sequence became constant.
    pub stabilized_at: usize,
    pub exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regularity: Option<RegularityWitness>,
    pub warnings: Vec<Warning>,
}

impl FlagResult {
    pub fn terminal_basis(&self) -> &[WElement] {
        self.bases.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

/// `F` at `x` as a matrix on the fibre.
pub fn curvature_operator(m: &MetricSpec, x: &[Scalar], opts: &EvalOptions) -> Result<CurvatureOperator> {
    m.at_point(x, opts.mode, opts.tol)?;
    let geo = Geometry::new(m, x, opts.mode, 3)?;
    Ok(CurvatureOperator::from_field(&operator::curvature_field(&geo)))
}

fn identity_basis(nn: usize) -> Vec<Vec<Scalar>> {
    (0..nn)
        .map(|i| (0..nn).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect())
        .collect()
}

/// Reduced echelon form of an exact spanning set.
fn reduce_exact(vectors: Vec<Vec<Scalar>>, nn: usize) -> Vec<Vec<Scalar>> {
    let rows: Vec<Vec<_>> = vectors
        .iter()
        .map(|v| v.iter().map(|s| s.as_exact().expect("exact").clone()).collect())
        .collect();
    let (rref, _) = linalg::exact_rref(&rows, nn);
    rref.into_iter()
        .map(|r| r.into_iter().map(Scalar::Exact).collect())
        .collect()
}

/// Evaluates the flag at `x` without probing.
pub fn flag_at(m: &MetricSpec, x: &[Scalar], opts: &EvalOptions) -> Result<FlagResult> {
    m.at_point(x, opts.mode, opts.tol)?;
    let n = m.dim();
    let nn = fibre_dim(n);
    let cap = opts.order_cap(n);
    let mut basis = identity_basis(nn);
    let mut ranks = Vec::new();
    let mut bases = Vec::new();
    let mut exact = true;
    let stabilized_at;

    // geometry jets are re-expanded to a higher order when deeper levels are needed
    let mut geo: Option<Geometry> = None;
    let mut fields: Vec<operator::WField> = Vec::new();
    let mut conn = Vec::new();
    let mut k = 0;
    loop {
        // level k uses ∇^{k+1} R
        if k + 1 > cap || k > nn {
            return Err(Error::OrderCapExceeded {
                requested: k + 1,
                cap: cap.min(nn + 1),
            });
        }
        let have = geo.as_ref().map_or(false, |g| g.jet_order() >= k + 3);
        if !have {
            let order = if k == 0 { 3 } else { k + 5 };
            let g = Geometry::new(m, x, opts.mode, order)?;
            conn = operator::connection_coefficients(&g);
            fields = vec![operator::curvature_field(&g)];
            geo = Some(g);
        }
        let g = geo.as_ref().expect("geometry");
        while fields.len() <= k {
            let next = operator::covariant_derivative(fields.last().expect("level 0"), g, &conn);
            fields.push(next);
        }
        let a = fields[k].matrix();
        // restrict to the previous level: columns are the current basis vectors
        let restricted: Vec<Vec<Scalar>> = a
            .iter()
            .map(|row| basis.iter().map(|b| row.iter().zip(b).map(|(x, y)| x * y).sum()).collect())
            .collect();
        let ker = linalg::kernel(&restricted, basis.len(), opts.tol);
        let mut next: Vec<Vec<Scalar>> = ker.basis.iter().map(|c| linalg::combine(c, &basis, nn)).collect();
        if all_exact(&next) && !next.is_empty() {
            next = reduce_exact(next, nn);
        } else if !next.is_empty() {
            exact = false;
        }
        if !ker.exact {
            exact = false;
        }
        let r = next.len();
        basis = next;
        bases.push(
            basis
                .iter()
                .map(|v| WElement::from_vec(n, v).expect("fibre length"))
                .collect(),
        );
        ranks.push(r);
        if k > 0 && ranks[k - 1] == r {
            stabilized_at = k - 1;
            break;
        }
        if r == nn || r == 0 {
            stabilized_at = k;
            break;
        }
        k += 1;
    }
    Ok(FlagResult {
        dim: n,
        terminal_rank: *ranks.last().expect("at least one level"),
        ranks,
        bases,
        stabilized_at,
        exact,
        regularity: None,
        warnings: Vec::new(),
    })
}

/// Deterministic probe points within `radius` (per coordinate) of `x`.
pub fn probe_points(x: &[Scalar], samples: usize, radius: &Scalar, seed: u64) -> Vec<Vec<Scalar>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            x.iter()
                .map(|xi| {
                    let u = Scalar::ratio(rng.random_range(-1000..=1000), 1000);
                    xi + &(radius * &u)
                })
                .collect()
        })
        .collect()
}

/// Recomputes the flag at perturbed points and records whether the rank
/// sequences agree with the one at `x`.
pub fn regularity_probe(
    m: &MetricSpec,
    x: &[Scalar],
    samples: usize,
    radius: &Scalar,
    opts: &EvalOptions,
    seed: u64,
) -> Result<RegularityWitness> {
    if samples == 0 {
        return Err(Error::InvalidConfig("regularity probe needs at least one sample".into()));
    }
    let reference = flag_at(m, x, opts)?.ranks;
    let mut out = Vec::new();
    let mut agree = true;
    for p in probe_points(x, samples, radius, seed) {
        let point = p.iter().map(Scalar::to_f64).collect();
        match flag_at(m, &p, opts) {
            Ok(f) => {
                agree &= f.ranks == reference;
                out.push(ProbeSample {
                    point,
                    ranks: Some(f.ranks),
                    skipped: None,
                });
            }
            Err(e) => out.push(ProbeSample {
                point,
                ranks: None,
                skipped: Some(e.to_string()),
            }),
        }
    }
    Ok(RegularityWitness {
        reference,
        radius: radius.to_f64(),
        samples: out,
        agree,
    })
}

/// The derived flag at `x`, with probe-based regularity evidence.
pub fn derived_flag(m: &MetricSpec, x: &[Scalar], config: &FlagConfig) -> Result<FlagResult> {
    let mut result = flag_at(m, x, &config.eval)?;
    if config.probes > 0 {
        let witness = regularity_probe(m, x, config.probes, &config.probe_radius, &config.eval, config.probe_seed)?;
        if !witness.agree {
            result.warnings.push(Warning::regularity(format!(
                "flag ranks {:?} at the point differ from probe ranks {:?}",
                witness.reference,
                witness.samples.iter().filter_map(|s| s.ranks.clone()).collect::<Vec<_>>()
            )));
        }
        for s in witness.samples.iter().filter(|s| s.skipped.is_some()) {
            result.warnings.push(Warning::probe_skipped(format!(
                "probe at {:?} skipped: {}",
                s.point,
                s.skipped.as_deref().unwrap_or("")
            )));
        }
        result.regularity = Some(witness);
    }
    Ok(result)
}
