//! Expression language for metric components.

mod ast;
mod diff;
mod eval;
mod parse;

pub use ast::{Chart, Expr, ExprDisplay, Func, Node};
pub use diff::{derivative, differentiate};
pub use eval::{evaluate, evaluate_f64, evaluate_in, EvalDomain};
pub use parse::parse;
