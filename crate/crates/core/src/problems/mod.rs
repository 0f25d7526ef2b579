//! Benchmark registry, expression language and forward-mode AD.

pub mod builtin;
pub mod dual;
pub mod expr;
pub mod file;

pub use builtin::{builtin, describe, gomez_levy_start, orthant_quadratic, BUILTIN_NAMES};
pub use dual::DualNumber;
pub use expr::{ad_gradient, parse_expr, BinaryOp, DomainError, Expr, UnaryOp};
pub use file::{parse_problem, ExprField};
