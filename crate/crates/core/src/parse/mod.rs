//! Tolerant JavaScript parser producing a span-faithful AST.

pub mod ast;
mod parser;

pub use ast::*;
pub use parser::{parse, ParseOutcome};
