use crate::error::{Error, Result};
use crate::expr::{evaluate, parse, Chart, Expr};
use crate::linalg::{self, Matrix};
use crate::scalar::{Mode, Scalar};

/// A metric given by coordinate expressions on one chart.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpec {
    chart: Chart,
    /// Full symmetric matrix; `components[a][b]` and `components[b][a]`
    /// share one expression.
    components: Vec<Vec<Expr>>,
    signature: (usize, usize),
}

impl MetricSpec {
    /// Builds a metric from its upper triangle, listed row by row
    /// (`g11, g12, ..., g1n, g22, ...`).
    pub fn new(chart: Chart, upper: Vec<Expr>, signature: (usize, usize)) -> Result<MetricSpec> {
        let n = chart.dim();
        if n < 2 {
            return Err(Error::InvalidMetric(format!("dimension must be at least 2, got {n}")));
        }
        if upper.len() != n * (n + 1) / 2 {
            return Err(Error::InvalidMetric(format!(
                "expected {} upper-triangle components for dimension {n}, got {}",
                n * (n + 1) / 2,
                upper.len()
            )));
        }
        if signature.0 + signature.1 != n {
            return Err(Error::InvalidMetric(format!(
                "signature ({},{}) does not add up to dimension {n}",
                signature.0, signature.1
            )));
        }
        for e in &upper {
            if e.max_var().is_some_and(|v| v >= n) {
                return Err(Error::InvalidMetric("component refers to a coordinate outside the chart".into()));
            }
        }
        let mut components = vec![vec![Expr::zero(); n]; n];
        let mut it = upper.into_iter();
        for a in 0..n {
            for b in a..n {
                let e = it.next().expect("counted above");
                components[a][b] = e.clone();
                components[b][a] = e;
            }
        }
        Ok(MetricSpec {
            chart,
            components,
            signature,
        })
    }

    /// Parses coordinate names and upper-triangle component strings.
    pub fn parse(coords: &[&str], upper: &[&str], signature: (usize, usize)) -> Result<MetricSpec> {
        let chart = Chart::new(coords.iter().copied());
        let exprs = upper
            .iter()
            .map(|s| parse(s, &chart))
            .collect::<Result<Vec<_>>>()?;
        MetricSpec::new(chart, exprs, signature)
    }

    /// Riemannian metric, signature `(n, 0)`.
    pub fn riemannian(coords: &[&str], upper: &[&str]) -> Result<MetricSpec> {
        MetricSpec::parse(coords, upper, (coords.len(), 0))
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn component(&self, a: usize, b: usize) -> &Expr {
        &self.components[a][b]
    }

    pub fn components(&self) -> &[Vec<Expr>] {
        &self.components
    }

    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    pub fn is_riemannian(&self) -> bool {
        self.signature.1 == 0
    }

    pub fn check_point(&self, x: &[Scalar]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::WrongDimension {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// Evaluated components at `x`.
    pub fn evaluate(&self, x: &[Scalar], mode: Mode) -> Result<Matrix> {
        self.check_point(x)?;
        self.components
            .iter()
            .map(|row| row.iter().map(|e| evaluate(e, x, mode)).collect())
            .collect()
    }

    /// Evaluates `g` at `x`, inverts it and checks the declared signature.
    /// Returns `(g, g^{-1}, det g)`.
    pub fn at_point(&self, x: &[Scalar], mode: Mode, tol: f64) -> Result<(Matrix, Matrix, Scalar)> {
        let g = self.evaluate(x, mode)?;
        let (ginv, det) = linalg::invert(&g, tol.min(1e-12))?;
        let s = linalg::signature(&g, tol);
        if s.zero > 0 {
            return Err(Error::SingularMetric {
                determinant: det.to_f64(),
            });
        }
        if (s.positive, s.negative) != self.signature {
            return Err(Error::SignatureMismatch {
                declared_p: self.signature.0,
                declared_q: self.signature.1,
                found_p: s.positive,
                found_q: s.negative,
            });
        }
        Ok((g, ginv, det))
    }
}
