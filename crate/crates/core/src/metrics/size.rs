//! Line, statement, and comment counting.
//!
//! Ownership is innermost-wins: every token belongs to the tightest function
//! span containing its start position, or to file scope. "Own" counts (LLOC,
//! CLOC, NOS) use only a function's own tokens; "total" counts (TLLOC, TCLOC,
//! TNOS) fold descendants back in. LOC and TLOC are both the raw span height:
//! a function's span always includes its nested functions.

use alloc::vec::Vec;

use hashbrown::HashSet;

use crate::inventory::{FunctionRecord, Inventory};
use crate::lex::Token;
use crate::parse::{FunctionDef, Stmt};
use crate::span::SourceSpan;

use super::walk::{walk_own_fn, OwnNode};

fn contains_point(span: &SourceSpan, line: u32, col: u32) -> bool {
    (line, col) >= (span.start_line, span.start_col) && (line, col) < (span.end_line, span.end_col)
}

/// Innermost owning record per token, by token start position. Records are
/// pre-ordered and properly nested, so a single sweep with an active-span
/// stack suffices.
pub fn token_owners(tokens: &[Token], records: &[FunctionRecord]) -> Vec<Option<usize>> {
    let mut owners = Vec::with_capacity(tokens.len());
    let mut stack: Vec<usize> = Vec::new();
    let mut next = 0usize;
    for token in tokens {
        let (line, col) = (token.span.start_line, token.span.start_col);
        while let Some(&top) = stack.last() {
            if contains_point(&records[top].key.span, line, col) {
                break;
            }
            stack.pop();
        }
        while next < records.len() {
            let span = &records[next].key.span;
            if (span.start_line, span.start_col) > (line, col) {
                break;
            }
            if contains_point(span, line, col) {
                stack.push(next);
            }
            next += 1;
        }
        owners.push(stack.last().copied());
    }
    owners
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SizeCounts {
    pub loc: u32,
    pub tloc: u32,
    pub lloc: u32,
    pub tlloc: u32,
    pub cloc: u32,
    pub tcloc: u32,
    pub dloc: u32,
    pub cd: f64,
    pub tcd: f64,
}

/// Line-based counts for every record, in record order.
pub fn size_and_comments(
    tokens: &[Token],
    owners: &[Option<usize>],
    inventory: &Inventory<'_>,
) -> Vec<SizeCounts> {
    let n = inventory.records.len();
    let mut own_code: Vec<HashSet<u32>> = (0..n).map(|_| HashSet::new()).collect();
    let mut own_comment: Vec<HashSet<u32>> = (0..n).map(|_| HashSet::new()).collect();
    let mut file_code: HashSet<u32> = HashSet::new();
    let mut file_comment: HashSet<u32> = HashSet::new();

    for (token, owner) in tokens.iter().zip(owners) {
        let lines = token.span.start_line..=token.span.end_line;
        if token.is_comment() {
            file_comment.extend(lines.clone());
            if let Some(o) = *owner {
                own_comment[o].extend(lines);
            }
        } else {
            file_code.extend(lines.clone());
            if let Some(o) = *owner {
                own_code[o].extend(lines);
            }
        }
    }

    // Totals are unions, not sums: a line shared by parent and child (the
    // child's header line, say) must count once.
    let mut total_code = own_code.clone();
    let mut total_comment = own_comment.clone();
    for idx in (0..n).rev() {
        if let Some(parent) = inventory.records[idx].parent {
            let (head, tail) = total_code.split_at_mut(idx);
            head[parent].extend(tail[0].iter().copied());
            let (head, tail) = total_comment.split_at_mut(idx);
            head[parent].extend(tail[0].iter().copied());
        }
    }

    inventory
        .records
        .iter()
        .enumerate()
        .map(|(idx, record)| {
            let loc = record.key.span.line_count();
            let lloc = own_code[idx].len() as u32;
            let tlloc = total_code[idx].len() as u32;
            let cloc = own_comment[idx].len() as u32;
            let tcloc = total_comment[idx].len() as u32;

            // Documentation lines: the contiguous comment-only run directly
            // above the definition.
            let mut dloc = 0u32;
            let mut line = record.key.span.start_line;
            while line > 1 {
                line -= 1;
                if file_comment.contains(&line) && !file_code.contains(&line) {
                    dloc += 1;
                } else {
                    break;
                }
            }

            let cd = ratio(cloc, lloc);
            let tcd = ratio(tcloc, tlloc);
            SizeCounts { loc, tloc: loc, lloc, tlloc, cloc, tcloc, dloc, cd, tcd }
        })
        .collect()
}

fn ratio(comment: u32, logical: u32) -> f64 {
    let denom = comment + logical;
    if denom == 0 {
        0.0
    } else {
        comment as f64 / denom as f64
    }
}

/// Number of statements in the function's own code. Blocks, labels, and empty
/// statements are structure, not statements; an `export` wrapping a
/// declaration defers to the declaration it wraps.
pub fn statements(def: &FunctionDef) -> u32 {
    let mut count = 0u32;
    walk_own_fn(def, &mut |node| {
        if let OwnNode::Stmt(stmt) = node {
            let counted = !matches!(
                stmt,
                Stmt::Block { .. }
                    | Stmt::Empty { .. }
                    | Stmt::Labeled { .. }
                    | Stmt::Export { decl: Some(_), .. }
            );
            if counted {
                count += 1;
            }
        }
    });
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inventory::inventory_program;
    use crate::lex::tokenize;
    use crate::parse::parse;

    fn analyze(src: &str) -> (Vec<SizeCounts>, Vec<u32>) {
        let stream = tokenize(src);
        let parsed = parse(&stream);
        assert!(parsed.diagnostics.is_empty(), "{:?}", parsed.diagnostics);
        let inv = inventory_program("t.js", &parsed.program);
        let owners = token_owners(&stream.tokens, &inv.records);
        let sizes = size_and_comments(&stream.tokens, &owners, &inv);
        let nos = inv.defs.iter().map(|d| statements(d)).collect();
        (sizes, nos)
    }

    #[test]
    fn test_loc_is_span_height() {
        let (sizes, _) = analyze("function f() {\n  return 1;\n}\n");
        assert_eq!(sizes[0].loc, 3);
        assert_eq!(sizes[0].tloc, 3);
    }

    #[test]
    fn test_lloc_skips_blank_and_comment_lines() {
        let src = "function f() {\n  let a = 1;\n\n  // note\n  return a;\n}\n";
        let (sizes, _) = analyze(src);
        // Lines 1, 2, 5, 6 carry code; 3 is blank, 4 comment-only.
        assert_eq!(sizes[0].lloc, 4);
        assert_eq!(sizes[0].cloc, 1);
        assert_eq!(sizes[0].loc, 6);
    }

    #[test]
    fn test_nested_function_owns_its_lines() {
        let src = "function outer() {\n  const inner = function () {\n    return 1;\n  };\n  return inner;\n}\n";
        let (sizes, _) = analyze(src);
        // Inner occupies lines 2-4; line 2 and 4 also carry outer tokens
        // (`const inner =` and `;`), line 3 is inner-only.
        assert_eq!(sizes[0].lloc, 5);
        assert_eq!(sizes[0].tlloc, 6);
        assert_eq!(sizes[1].lloc, 3);
        assert_eq!(sizes[0].loc, 6);
        assert_eq!(sizes[1].loc, 3);
    }

    #[test]
    fn test_comment_totals_roll_up() {
        let src = "function outer() {\n  function inner() {\n    // inside inner\n    return 1;\n  }\n  // inside outer\n  return inner;\n}\n";
        let (sizes, _) = analyze(src);
        assert_eq!(sizes[0].cloc, 1);
        assert_eq!(sizes[1].cloc, 1);
        assert_eq!(sizes[0].tcloc, 2);
        assert_eq!(sizes[1].tcloc, 1);
    }

    #[test]
    fn test_dloc_contiguous_run() {
        let src = "// header line one\n// header line two\nfunction f() {\n  return 1;\n}\n";
        let (sizes, _) = analyze(src);
        assert_eq!(sizes[0].dloc, 2);
        // The documentation lives at file scope, not inside the function.
        assert_eq!(sizes[0].cloc, 0);
    }

    #[test]
    fn test_dloc_stops_at_blank_line() {
        let src = "// stranded comment\n\nfunction f() {\n  return 1;\n}\n";
        let (sizes, _) = analyze(src);
        assert_eq!(sizes[0].dloc, 0);
    }

    #[test]
    fn test_dloc_block_comment_lines() {
        let src = "/**\n * Adds.\n */\nfunction add(a, b) {\n  return a + b;\n}\n";
        let (sizes, _) = analyze(src);
        assert_eq!(sizes[0].dloc, 3);
    }

    #[test]
    fn test_cd_ratio() {
        let src = "function f() {\n  // one comment line\n  let a = 1;\n  return a;\n}\n";
        let (sizes, _) = analyze(src);
        // cloc 1, lloc 4 (lines 1, 3, 4, 5).
        assert_eq!(sizes[0].cd, 1.0 / 5.0);
        assert_eq!(sizes[0].tcd, sizes[0].cd);
    }

    #[test]
    fn test_multiline_template_lines_are_code() {
        let src = "function f() {\n  return `a\nb\nc`;\n}\n";
        let (sizes, _) = analyze(src);
        assert_eq!(sizes[0].lloc, 5);
    }

    #[test]
    fn test_statement_counts() {
        let src = "function f(x) {\n  let a = 1;\n  if (x) { a = 2; }\n  for (;;) break;\n  return a;\n}\n";
        let (_, nos) = analyze(src);
        assert_eq!(nos[0], 6); // VarDecl, If, Expr, For, Break, Return
    }

    #[test]
    fn test_blocks_and_labels_are_not_statements() {
        let src = "function f() {\n  outer: {\n    g();\n    h();\n  }\n}\n";
        let (_, nos) = analyze(src);
        assert_eq!(nos[0], 2);
    }

    #[test]
    fn test_nested_declaration_counts_once() {
        let src = "function f() {\n  function g(x) {\n    return x;\n    }\n}\n";
        let (_, nos) = analyze(src);
        assert_eq!(nos[0], 1, "nested declaration is one statement of f");
        assert_eq!(nos[1], 1, "g owns its return");
    }

    #[test]
    fn test_token_owner_boundaries() {
        let src = "const a = 1; function f() { return 2; } const b = 3;\n";
        let stream = tokenize(src);
        let parsed = parse(&stream);
        let inv = inventory_program("t.js", &parsed.program);
        let owners = token_owners(&stream.tokens, &inv.records);
        let lexemes: Vec<&str> = stream.tokens.iter().map(|t| t.lexeme.as_str()).collect();
        let pos = |needle: &str| lexemes.iter().position(|l| *l == needle).unwrap();
        assert_eq!(owners[pos("a")], None);
        assert_eq!(owners[pos("function")], Some(0));
        assert_eq!(owners[pos("return")], Some(0));
        assert_eq!(owners[pos("}")], Some(0));
        assert_eq!(owners[pos("b")], None);
    }
}
