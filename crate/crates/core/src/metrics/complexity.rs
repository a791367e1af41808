//! Cyclomatic complexity and nesting depth.
//!
//! McCC counts `if`, `for`, `for-in`/`for-of`, `while`, `do`, non-default
//! `case`, `catch`, and conditional expressions, plus one. `else`, `switch`
//! itself, `default`, and the short-circuit operators add nothing; each
//! construct can be toggled off in [`MetricsConfig`].
//!
//! NL is the maximum nesting depth of control-structure bodies in the
//! function's own code. An `else if` continues its chain at the same depth
//! (the chain reads flat), which makes NL and NLE coincide under this
//! definition; both columns are emitted, mirroring the reference table's own
//! alias pairs.

use crate::parse::{Expr, FnBody, FunctionDef, Stmt};

use super::walk::{walk_own_fn, OwnNode};
use super::MetricsConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Complexity {
    pub mccc: u32,
    pub nl: u32,
    pub nle: u32,
}

pub fn complexity(def: &FunctionDef, config: &MetricsConfig) -> Complexity {
    let mut mccc = 1u32;
    walk_own_fn(def, &mut |node| {
        let counted = match node {
            OwnNode::Stmt(Stmt::If { .. }) => config.mccc_if,
            OwnNode::Stmt(Stmt::For { .. }) => config.mccc_for,
            OwnNode::Stmt(Stmt::ForEach { .. }) => config.mccc_foreach,
            OwnNode::Stmt(Stmt::While { .. }) => config.mccc_while,
            OwnNode::Stmt(Stmt::DoWhile { .. }) => config.mccc_do,
            OwnNode::Case(case) => config.mccc_case && case.test.is_some(),
            OwnNode::Catch(_) => config.mccc_catch,
            OwnNode::Expr(Expr::Cond { .. }) => config.mccc_ternary,
            _ => false,
        };
        if counted {
            mccc += 1;
        }
    });

    let mut max_depth = 0u32;
    if let FnBody::Block(stmts) = &def.body {
        for stmt in stmts {
            depth_stmt(stmt, 0, &mut max_depth);
        }
    }
    Complexity { mccc, nl: max_depth, nle: max_depth }
}

fn bump(max: &mut u32, depth: u32) {
    if depth > *max {
        *max = depth;
    }
}

/// Statements only: expressions cannot contain statements outside nested
/// functions, which have their own depth count.
fn depth_stmt(stmt: &Stmt, depth: u32, max: &mut u32) {
    match stmt {
        Stmt::If { cons, alt, .. } => {
            bump(max, depth + 1);
            branch_body(cons, depth + 1, max);
            match alt.as_deref() {
                // `else if` continues the chain at the same depth.
                Some(chained @ Stmt::If { .. }) => depth_stmt(chained, depth, max),
                Some(other) => branch_body(other, depth + 1, max),
                None => {}
            }
        }
        Stmt::For { body, .. }
        | Stmt::ForEach { body, .. }
        | Stmt::While { body, .. }
        | Stmt::DoWhile { body, .. }
        | Stmt::With { body, .. } => {
            bump(max, depth + 1);
            branch_body(body, depth + 1, max);
        }
        Stmt::Switch { cases, .. } => {
            bump(max, depth + 1);
            for case in cases {
                for inner in &case.body {
                    depth_stmt(inner, depth + 1, max);
                }
            }
        }
        Stmt::Try { block, catch, finally, .. } => {
            bump(max, depth + 1);
            for inner in block {
                depth_stmt(inner, depth + 1, max);
            }
            if let Some(clause) = catch {
                for inner in &clause.body {
                    depth_stmt(inner, depth + 1, max);
                }
            }
            if let Some(stmts) = finally {
                for inner in stmts {
                    depth_stmt(inner, depth + 1, max);
                }
            }
        }
        // Bare blocks and labels are transparent.
        Stmt::Block { body, .. } => {
            for inner in body {
                depth_stmt(inner, depth, max);
            }
        }
        Stmt::Labeled { body, .. } => depth_stmt(body, depth, max),
        Stmt::Export { decl: Some(decl), .. } => depth_stmt(decl, depth, max),
        _ => {}
    }
}

fn branch_body(stmt: &Stmt, depth: u32, max: &mut u32) {
    // The block wrapper of a branch is the branch itself, not a second level.
    match stmt {
        Stmt::Block { body, .. } => {
            for inner in body {
                depth_stmt(inner, depth, max);
            }
        }
        other => depth_stmt(other, depth, max),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inventory::inventory_program;
    use crate::lex::tokenize;
    use crate::parse::parse;
    use alloc::vec::Vec;

    fn complexities(src: &str) -> Vec<Complexity> {
        let stream = tokenize(src);
        let parsed = parse(&stream);
        assert!(parsed.diagnostics.is_empty(), "{:?}", parsed.diagnostics);
        let inv = inventory_program("t.js", &parsed.program);
        let config = MetricsConfig::default();
        inv.defs.iter().map(|d| complexity(d, &config)).collect()
    }

    #[test]
    fn test_straight_line_body() {
        let c = complexities("function f() { const a = 1; return a; }\n");
        assert_eq!(c[0].mccc, 1);
        assert_eq!(c[0].nl, 0);
    }

    #[test]
    fn test_if_plus_for() {
        let c = complexities("function f(xs) {\n  if (xs) {}\n  for (const x of xs) {}\n}\n");
        assert_eq!(c[0].mccc, 3);
    }

    #[test]
    fn test_else_if_chain_is_one_level() {
        let c = complexities(
            "function f(x) {\n  if (x === 1) { a(); } else if (x === 2) { b(); } else { c(); }\n}\n",
        );
        assert_eq!(c[0].nl, 1);
        assert_eq!(c[0].nle, 1);
        // Two ifs, one chain: both decide.
        assert_eq!(c[0].mccc, 3);
    }

    #[test]
    fn test_nested_if_is_two_levels() {
        let c = complexities("function f(x) {\n  if (x) {\n    if (x > 1) { a(); }\n  }\n}\n");
        assert_eq!(c[0].nl, 2);
        assert_eq!(c[0].nle, 2);
    }

    #[test]
    fn test_switch_counts_cases_not_default() {
        let c = complexities(
            "function f(x) {\n  switch (x) {\n    case 1: return 1;\n    case 2: return 2;\n    default: return 0;\n  }\n}\n",
        );
        assert_eq!(c[0].mccc, 3);
        assert_eq!(c[0].nl, 1); // the switch is one level; case bodies sit at it
    }

    #[test]
    fn test_catch_and_ternary() {
        let c = complexities("function f() {\n  try { g(); } catch (e) { return e ? 1 : 0; }\n}\n");
        assert_eq!(c[0].mccc, 3);
    }

    #[test]
    fn test_nested_function_excluded() {
        let c = complexities("function outer() {\n  function inner(x) { if (x) {} }\n}\n");
        assert_eq!(c[0].mccc, 1, "outer sees no decisions");
        assert_eq!(c[1].mccc, 2, "inner sees its own if");
        assert_eq!(c[0].nl, 0);
        assert_eq!(c[1].nl, 1);
    }

    #[test]
    fn test_construct_toggles() {
        let src = "function f(a) { return a ? 1 : 0; }\n";
        let stream = tokenize(src);
        let parsed = parse(&stream);
        let inv = inventory_program("t.js", &parsed.program);
        let mut config = MetricsConfig::default();
        assert_eq!(complexity(inv.defs[0], &config).mccc, 2);
        config.mccc_ternary = false;
        assert_eq!(complexity(inv.defs[0], &config).mccc, 1);
    }

    #[test]
    fn test_loops_nest() {
        let c = complexities(
            "function f(m) {\n  for (let i = 0; i < m; i++) {\n    while (i) {\n      do { i--; } while (i > 2);\n    }\n  }\n}\n",
        );
        assert_eq!(c[0].nl, 3);
        assert_eq!(c[0].mccc, 4);
    }

    #[test]
    fn test_expression_bodied_arrow() {
        let c = complexities("const f = (a) => a ? 1 : 0;\n");
        assert_eq!(c[0].mccc, 2);
        assert_eq!(c[0].nl, 0);
    }
}
