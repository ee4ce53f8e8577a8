//! Serialized form of numbers in reports: full-precision value, the exact
//! rational when known, and a rounded display string.

use serde::{Serialize, Serializer};

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Num {
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    pub display: String,
}

impl Num {
    pub fn from_f64(v: f64) -> Num {
        Num {
            value: v,
            exact: None,
            display: display(v),
        }
    }
}

impl From<&Scalar> for Num {
    fn from(s: &Scalar) -> Num {
        let v = s.to_f64();
        Num {
            value: v,
            exact: s.as_exact().map(|r| r.to_string()),
            display: display(v),
        }
    }
}

impl From<f64> for Num {
    fn from(v: f64) -> Num {
        Num::from_f64(v)
    }
}

/// Rounded rendering with six significant digits.
pub fn display(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let a = v.abs();
    if (1e-4..1e6).contains(&a) {
        let digits = (5 - a.log10().floor() as i32).max(0) as usize;
        let s = format!("{v:.digits$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{v:.5e}")
    }
}

pub fn serialize_scalars<S: Serializer>(v: &[Scalar], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(Num::from))
}

pub fn serialize_scalar<S: Serializer>(v: &Scalar, s: S) -> Result<S::Ok, S::Error> {
    Num::from(v).serialize(s)
}

pub fn serialize_opt_scalar<S: Serializer>(v: &Option<Scalar>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => Num::from(x).serialize(s),
        None => s.serialize_none(),
    }
}
