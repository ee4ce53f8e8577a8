//! TOML metric files.
//!
//! ```toml
//! name = "paraboloid"
//! coords = ["x", "y"]
//! signature = [2, 0]            # optional, Riemannian by default
//! components = ["1 + 4*x^2", "4*x*y", "1 + 4*y^2"]   # upper triangle, row by row
//! point = ["1", "0"]            # optional default point
//! ```

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::scalar::Scalar;
use crate::tensor::MetricSpec;

use super::catalog::{self, parse_number};

/// A string expression or a bare TOML number.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Entry {
    Text(String),
    Int(i64),
    Float(f64),
}

impl Entry {
    fn text(&self) -> String {
        match self {
            Entry::Text(s) => s.clone(),
            Entry::Int(i) => i.to_string(),
            Entry::Float(f) => format!("{f:?}"),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct MetricFile {
    name: Option<String>,
    dim: Option<usize>,
    coords: Vec<String>,
    signature: Option<[usize; 2]>,
    components: Vec<Entry>,
    point: Option<Vec<Entry>>,
}

/// A metric ready for analysis, from a file or the catalog.
#[derive(Debug, Clone)]
pub struct LoadedMetric {
    /// `catalog:<name>` or the file path.
    pub id: String,
    pub name: Option<String>,
    pub metric: MetricSpec,
    /// Upper-triangle component strings as given.
    pub components: Vec<String>,
    pub default_point: Option<Vec<Scalar>>,
    /// Vector fields known to be Killing (catalog entries only).
    pub known_fields: Vec<Vec<Expr>>,
}

/// Parses the TOML text of a metric file.
pub fn parse_metric_file(text: &str, id: &str) -> Result<LoadedMetric> {
    let file: MetricFile = toml::from_str(text).map_err(|e| Error::InvalidMetric(format!("{id}: {}", e.message())))?;
    let n = file.coords.len();
    if n == 0 {
        return Err(Error::InvalidMetric(format!("{id}: no coordinates")));
    }
    if let Some(d) = file.dim {
        if d != n {
            return Err(Error::InvalidMetric(format!("{id}: dim = {d} but {n} coordinates")));
        }
    }
    let expected = n * (n + 1) / 2;
    if file.components.len() != expected {
        return Err(Error::InvalidMetric(format!(
            "{id}: {} components given, the upper triangle in dimension {n} has {expected}",
            file.components.len()
        )));
    }
    let signature = match file.signature {
        Some([p, q]) if p + q == n => (p, q),
        Some([p, q]) => {
            return Err(Error::InvalidMetric(format!("{id}: signature ({p},{q}) in dimension {n}")));
        }
        None => (n, 0),
    };
    let components: Vec<String> = file.components.iter().map(Entry::text).collect();
    let coords: Vec<&str> = file.coords.iter().map(String::as_str).collect();
    let upper: Vec<&str> = components.iter().map(String::as_str).collect();
    let metric = MetricSpec::parse(&coords, &upper, signature)?;
    let default_point = match file.point {
        Some(p) => {
            let p = p.iter().map(|e| parse_number(&e.text())).collect::<Result<Vec<_>>>()?;
            if p.len() != n {
                return Err(Error::InvalidMetric(format!("{id}: point has {} entries, expected {n}", p.len())));
            }
            Some(p)
        }
        None => None,
    };
    Ok(LoadedMetric {
        id: id.to_string(),
        name: file.name,
        metric,
        components,
        default_point,
        known_fields: Vec::new(),
    })
}

/// Loads `catalog:<name>` or a metric file path.
pub fn load_metric(source: &str) -> Result<LoadedMetric> {
    if let Some(name) = source.strip_prefix("catalog:") {
        let entry = catalog::lookup(name)?;
        return Ok(LoadedMetric {
            id: source.to_string(),
            name: Some(entry.name.to_string()),
            metric: entry.metric(),
            components: entry.components.iter().map(|s| s.to_string()).collect(),
            default_point: Some(entry.default_point()),
            known_fields: entry.killing_fields(),
        });
    }
    let text = std::fs::read_to_string(Path::new(source)).map_err(|e| Error::Io(format!("{source}: {e}")))?;
    parse_metric_file(&text, source)
}

/// Parses a comma-separated point such as `0.785398,0` or `1/2, 1/3`.
pub fn parse_point(s: &str) -> Result<Vec<Scalar>> {
    s.split(',').map(|t| parse_number(t.trim())).collect()
}
