//! Killing-field analysis of metrics given by coordinate expressions.

pub mod classify;
pub mod cli;
pub mod error;
pub mod expr;
pub mod flag;
pub mod jet;
pub mod liealg;
pub mod linalg;
pub mod num;
pub mod oracle;
pub mod scalar;
pub mod tensor;

pub use error::{Error, Result, Warning, WarningKind};
pub use scalar::{Mode, Scalar};
