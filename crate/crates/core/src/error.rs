use thiserror::Error;

/// Errors raised anywhere in the analysis pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at column {position}: expected {}", expected.join(", "))]
    Syntax {
        position: usize,
        expected: Vec<String>,
    },
    #[error("unknown variable `{name}` at column {position}")]
    UnknownVariable { name: String, position: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("metric is singular at the analysis point (|det| = {determinant:e})")]
    SingularMetric { determinant: f64 },
    #[error("signature mismatch: declared ({declared_p},{declared_q}), found ({found_p},{found_q})")]
    SignatureMismatch {
        declared_p: usize,
        declared_q: usize,
        found_p: usize,
        found_q: usize,
    },
    #[error("derivative order {requested} exceeds the cap {cap}")]
    OrderCapExceeded { requested: usize, cap: usize },
    #[error("jet order {0} is too low (minimum 2)")]
    OrderTooLow(usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("operation requires dimension {expected}, metric has dimension {found}")]
    WrongDimension { expected: usize, found: usize },
    #[error("metric is not Riemannian (signature ({p},{q}))")]
    NotRiemannian { p: usize, q: usize },
    #[error("subspace is not closed under the bracket: pair ({i},{j}) leaves the span by {residual:e}")]
    NotClosed { i: usize, j: usize, residual: f64 },
    #[error("no named class for this algebra ({0})")]
    UnknownClass(String),
    #[error("unknown catalog entry `{0}`")]
    UnknownCatalogEntry(String),
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Pipeline module the error originates from; used in reports and exit messages.
    pub fn module(&self) -> &'static str {
        match self {
            Error::Syntax { .. } | Error::UnknownVariable { .. } | Error::Domain(_) => "expr",
            Error::SingularMetric { .. }
            | Error::SignatureMismatch { .. }
            | Error::OrderCapExceeded { .. }
            | Error::ShapeMismatch(_)
            | Error::WrongDimension { .. } => "tensor",
            Error::NotRiemannian { .. } => "classify",
            Error::NotClosed { .. } | Error::UnknownClass(_) => "liealg",
            Error::OrderTooLow(_) => "oracle",
            Error::UnknownCatalogEntry(_)
            | Error::InvalidMetric(_)
            | Error::InvalidConfig(_)
            | Error::Io(_) => "cli",
        }
    }
}

/// Non-fatal conditions collected alongside results.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Warning {
    pub kind: WarningKind,
    pub module: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WarningKind {
    /// Probe points disagree with the analysis point.
    Regularity,
    ProbeSkipped,
    /// `dc = 0` at the point without `c` being constant nearby.
    DegeneratePoint,
    /// Exact elimination replaced by floating point because of system size.
    FloatFallback,
    /// Jet-oracle dimension did not stabilize in the order.
    NotStabilized,
    /// Jet-oracle dimension differs from the flag's terminal rank.
    OracleMismatch,
    /// A report section could not be computed; the section is omitted.
    SectionFailed,
}

impl WarningKind {
    /// Kinds that cast doubt on the result and make the command line exit with 2.
    pub fn is_material(self) -> bool {
        matches!(
            self,
            WarningKind::Regularity | WarningKind::DegeneratePoint | WarningKind::NotStabilized
                | WarningKind::OracleMismatch
                | WarningKind::SectionFailed
        )
    }
}

impl Warning {
    pub fn new(kind: WarningKind, module: &'static str, message: impl Into<String>) -> Warning {
        Warning {
            kind,
            module,
            message: message.into(),
        }
    }

    pub fn regularity(message: impl Into<String>) -> Warning {
        Warning::new(WarningKind::Regularity, "flag", message)
    }

    pub fn probe_skipped(message: impl Into<String>) -> Warning {
        Warning::new(WarningKind::ProbeSkipped, "flag", message)
    }
}
