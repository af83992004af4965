//! Closed-form coordinate expressions with exact first and second partial
//! derivatives by forward-mode (order-2 jet) evaluation.
//!
//! The grammar is documented in `docs/expressions.md`.

mod eval;
mod jet;
mod parse;

pub use eval::EvalError;
pub use jet::{Jet1, Jet2};
pub use parse::{is_reserved, BinOp, Expr, Func, Node, ParseError};
