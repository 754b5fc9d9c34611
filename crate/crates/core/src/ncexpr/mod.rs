//! Noncommutative expressions: parsing, printing, series expansion and
//! direct evaluation.

mod ast;
mod eval;
mod expand;
mod parser;

pub use ast::{Builtin, Expr};
pub use eval::{eval_ast, ExprFunction};
pub use expand::expand;
pub use parser::parse;
