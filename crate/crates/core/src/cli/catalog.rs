//! Built-in metrics with default analysis points and known Killing fields.

use crate::error::{Error, Result};
use crate::expr::{parse, Expr};
use crate::scalar::Scalar;
use crate::tensor::MetricSpec;

#[derive(Debug, Clone, Copy)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub coords: &'static [&'static str],
    /// Upper triangle, row by row.
    pub components: &'static [&'static str],
    pub signature: (usize, usize),
    pub default_point: &'static [&'static str],
    /// Vector fields `ξ^a` known to be Killing, in the entry's chart.
    pub killing_fields: &'static [&'static [&'static str]],
}

static CATALOG: [CatalogEntry; 9] = [
    CatalogEntry {
        name: "euclidean2",
        description: "flat plane, Cartesian coordinates",
        coords: &["x", "y"],
        components: &["1", "0", "1"],
        signature: (2, 0),
        default_point: &["3/10", "1/5"],
        killing_fields: &[&["1", "0"], &["0", "1"], &["-y", "x"]],
    },
    CatalogEntry {
        name: "euclidean3",
        description: "flat 3-space, Cartesian coordinates",
        coords: &["x", "y", "z"],
        components: &["1", "0", "0", "1", "0", "1"],
        signature: (3, 0),
        default_point: &["1/2", "1/3", "1/5"],
        killing_fields: &[
            &["1", "0", "0"],
            &["0", "1", "0"],
            &["0", "0", "1"],
            &["-y", "x", "0"],
            &["0", "-z", "y"],
            &["z", "0", "-x"],
        ],
    },
    CatalogEntry {
        name: "euclidean-polar",
        description: "flat plane, polar coordinates",
        coords: &["r", "t"],
        components: &["1", "0", "r^2"],
        signature: (2, 0),
        default_point: &["2", "1/2"],
        killing_fields: &[&["0", "1"], &["cos(t)", "-sin(t)/r"], &["sin(t)", "cos(t)/r"]],
    },
    CatalogEntry {
        name: "sphere",
        description: "unit 2-sphere, polar angle and longitude",
        coords: &["theta", "phi"],
        components: &["1", "0", "sin(theta)^2"],
        signature: (2, 0),
        default_point: &["0.785398", "0"],
        killing_fields: &[
            &["0", "1"],
            &["sin(phi)", "cos(theta)/sin(theta)*cos(phi)"],
            &["cos(phi)", "-cos(theta)/sin(theta)*sin(phi)"],
        ],
    },
    CatalogEntry {
        name: "sphere3",
        description: "unit 3-sphere, stereographic chart",
        coords: &["x", "y", "z"],
        components: &[
            "4/(1 + x^2 + y^2 + z^2)^2",
            "0",
            "0",
            "4/(1 + x^2 + y^2 + z^2)^2",
            "0",
            "4/(1 + x^2 + y^2 + z^2)^2",
        ],
        signature: (3, 0),
        default_point: &["1/2", "1/3", "1/4"],
        killing_fields: &[
            &["-y", "x", "0"],
            &["0", "-z", "y"],
            &["z", "0", "-x"],
            &["(1 - x^2 - y^2 - z^2)/2 + x^2", "x*y", "x*z"],
        ],
    },
    CatalogEntry {
        name: "hyperbolic",
        description: "Poincare upper half-plane",
        coords: &["x", "y"],
        components: &["y^(-2)", "0", "y^(-2)"],
        signature: (2, 0),
        default_point: &["1/2", "1"],
        killing_fields: &[&["1", "0"], &["x", "y"], &["x^2 - y^2", "2*x*y"]],
    },
    CatalogEntry {
        name: "paraboloid",
        description: "paraboloid z = x^2 + y^2, induced metric",
        coords: &["x", "y"],
        components: &["1 + 4*x^2", "4*x*y", "1 + 4*y^2"],
        signature: (2, 0),
        default_point: &["1", "0"],
        killing_fields: &[&["-y", "x"]],
    },
    CatalogEntry {
        name: "perturbed2",
        description: "diagonal metric without symmetries",
        coords: &["x", "y"],
        components: &["1 + x^2 + y^3", "0", "1 + x*y^2"],
        signature: (2, 0),
        default_point: &["3/10", "1/5"],
        killing_fields: &[],
    },
    CatalogEntry {
        name: "minkowski2",
        description: "flat Lorentzian plane",
        coords: &["t", "x"],
        components: &["-1", "0", "1"],
        signature: (1, 1),
        default_point: &["1/2", "1/4"],
        killing_fields: &[&["1", "0"], &["0", "1"], &["x", "t"]],
    },
];

pub fn catalog() -> &'static [CatalogEntry] {
    &CATALOG
}

pub fn lookup(name: &str) -> Result<&'static CatalogEntry> {
    CATALOG
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownCatalogEntry(name.to_string()))
}

/// Parses a number the way metric expressions do (`3/10`, `0.25`, `1e-3`).
pub fn parse_number(s: &str) -> Result<Scalar> {
    let e = parse(s, &crate::expr::Chart::new(Vec::<String>::new()))
        .map_err(|e| Error::InvalidConfig(format!("cannot read `{s}` as a number: {e}")))?;
    e.as_const()
        .map(|c| Scalar::Exact(c.clone()))
        .ok_or_else(|| Error::InvalidConfig(format!("`{s}` is not a rational number")))
}

impl CatalogEntry {
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn metric(&self) -> MetricSpec {
        MetricSpec::parse(self.coords, self.components, self.signature).expect("catalog metrics parse")
    }

    pub fn default_point(&self) -> Vec<Scalar> {
        self.default_point
            .iter()
            .map(|s| parse_number(s).expect("catalog points parse"))
            .collect()
    }

    pub fn killing_fields(&self) -> Vec<Vec<Expr>> {
        let chart = self.metric().chart().clone();
        self.killing_fields
            .iter()
            .map(|f| f.iter().map(|s| parse(s, &chart).expect("catalog fields parse")).collect())
            .collect()
    }

    /// Number of local Killing fields at a regular point.
    pub fn expected_dimension(&self) -> usize {
        match self.name {
            "euclidean3" | "sphere3" => 6,
            "paraboloid" => 1,
            "perturbed2" => 0,
            _ => 3,
        }
    }
}
