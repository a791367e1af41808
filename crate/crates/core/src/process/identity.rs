//! Function identity across commits.
//!
//! A function is first matched to its predecessor by qualified name. When the
//! name changed (rename, re-nesting), we fall back to content similarity:
//! Jaccard over trigrams of normalized tokens (identifiers and literals
//! collapsed, so renaming a local variable does not break identity). Short
//! bodies carry too little signal for similarity, so anything under ten
//! normalized tokens matches by name only.
//!
//! Trigrams are hashed with FNV-1a rather than the table's default hasher:
//! fingerprints must be identical across runs for whole-pipeline output to be
//! reproducible, and the default hasher is seeded per process.

use alloc::string::String;
use alloc::vec::Vec;

use crate::inventory::FunctionRecord;
use crate::lex::{Token, TokenKind};
use crate::span::SourceSpan;

/// Fewer normalized tokens than this and content similarity is not trusted.
pub const MIN_SIMILARITY_TOKENS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct FnFingerprint {
    pub qualified_name: String,
    /// Normalized token count, including nested function bodies.
    pub token_len: usize,
    /// Sorted, deduplicated trigram hashes.
    pub trigrams: Vec<u64>,
}

fn in_span(span: &SourceSpan, line: u32, col: u32) -> bool {
    (line, col) >= (span.start_line, span.start_col) && (line, col) < (span.end_line, span.end_col)
}

fn normalized(token: &Token) -> &str {
    match token.kind {
        TokenKind::Identifier => "ID",
        TokenKind::Literal => "LIT",
        _ => &token.lexeme,
    }
}

fn fnv1a_trigram(a: &str, b: &str, c: &str) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut hash = OFFSET;
    for part in [a, b, c] {
        for byte in part.bytes() {
            hash ^= u64::from(byte);
            hash = hash.wrapping_mul(PRIME);
        }
        // 0xFF never occurs in UTF-8, so it cleanly separates tokens.
        hash ^= 0xFF;
        hash = hash.wrapping_mul(PRIME);
    }
    hash
}

/// Fingerprints every function in a file from one shared token stream.
pub fn fingerprint_records(tokens: &[Token], records: &[FunctionRecord]) -> Vec<FnFingerprint> {
    records
        .iter()
        .map(|record| {
            let span = &record.key.span;
            let norm: Vec<&str> = tokens
                .iter()
                .filter(|t| !t.is_comment() && in_span(span, t.span.start_line, t.span.start_col))
                .map(normalized)
                .collect();
            let mut trigrams: Vec<u64> = norm
                .windows(3)
                .map(|w| fnv1a_trigram(w[0], w[1], w[2]))
                .collect();
            trigrams.sort_unstable();
            trigrams.dedup();
            FnFingerprint {
                qualified_name: record.key.qualified_name.clone(),
                token_len: norm.len(),
                trigrams,
            }
        })
        .collect()
}

/// Jaccard similarity of two sorted deduplicated hash sets.
pub fn jaccard(a: &[u64], b: &[u64]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let mut i = 0;
    let mut j = 0;
    let mut both = 0usize;
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                both += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let union = a.len() + b.len() - both;
    both as f64 / union as f64
}

/// For each entry of `next`, the index in `prev` it continues, if any.
///
/// Name matches are taken first. The remainder are paired greedily by
/// descending similarity (ties broken by lower indices), so the result does
/// not depend on map iteration order.
pub fn match_functions(
    prev: &[FnFingerprint],
    next: &[FnFingerprint],
    threshold: f64,
) -> Vec<Option<usize>> {
    let mut matched: Vec<Option<usize>> = alloc::vec![None; next.len()];
    let mut prev_taken = alloc::vec![false; prev.len()];

    for (ni, nf) in next.iter().enumerate() {
        if let Some(pi) = prev
            .iter()
            .position(|pf| pf.qualified_name == nf.qualified_name)
        {
            if !prev_taken[pi] {
                matched[ni] = Some(pi);
                prev_taken[pi] = true;
            }
        }
    }

    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    for (ni, nf) in next.iter().enumerate() {
        if matched[ni].is_some() || nf.token_len < MIN_SIMILARITY_TOKENS {
            continue;
        }
        for (pi, pf) in prev.iter().enumerate() {
            if prev_taken[pi] || pf.token_len < MIN_SIMILARITY_TOKENS {
                continue;
            }
            let sim = jaccard(&pf.trigrams, &nf.trigrams);
            if sim >= threshold {
                candidates.push((sim, pi, ni));
            }
        }
    }
    candidates.sort_by(|x, y| {
        y.0.partial_cmp(&x.0)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(x.1.cmp(&y.1))
            .then(x.2.cmp(&y.2))
    });
    for (_, pi, ni) in candidates {
        if matched[ni].is_none() && !prev_taken[pi] {
            matched[ni] = Some(pi);
            prev_taken[pi] = true;
        }
    }
    matched
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inventory::inventory_program;
    use crate::lex::tokenize;
    use crate::parse::parse;

    fn fingerprints(src: &str) -> Vec<FnFingerprint> {
        let stream = tokenize(src);
        let parsed = parse(&stream);
        let inv = inventory_program("a.js", &parsed.program);
        fingerprint_records(&stream.tokens, &inv.records)
    }

    #[test]
    fn test_normalization_ignores_names_and_literals() {
        let a = fingerprints("function f(x) { var total = x + 1; return total * 2; }");
        let b = fingerprints("function g(y) { var sum = y + 10; return sum * 3; }");
        assert_eq!(a[0].trigrams, b[0].trigrams);
        assert_eq!(jaccard(&a[0].trigrams, &b[0].trigrams), 1.0);
    }

    #[test]
    fn test_comments_do_not_affect_fingerprint() {
        let a = fingerprints("function f(x) { return x + 1; }");
        let b = fingerprints("function f(x) { /* doc */ return x + 1; // t\n }");
        assert_eq!(a[0].trigrams, b[0].trigrams);
    }

    #[test]
    fn test_jaccard_merge_walk() {
        assert_eq!(jaccard(&[1, 2, 3, 4], &[3, 4, 5, 6]), 2.0 / 6.0);
        assert_eq!(jaccard(&[1, 2], &[1, 2]), 1.0);
        assert_eq!(jaccard(&[1], &[2]), 0.0);
        assert_eq!(jaccard(&[], &[]), 1.0);
        assert_eq!(jaccard(&[], &[7]), 0.0);
    }

    #[test]
    fn test_match_by_name_survives_heavy_edit() {
        let prev = fingerprints("function f() { return 1; }");
        let next =
            fingerprints("function f(a, b) { var c = a * b; while (c) { c -= 1; } return c; }");
        assert_eq!(match_functions(&prev, &next, 0.8), [Some(0)]);
    }

    #[test]
    fn test_match_by_similarity_after_rename() {
        let body = "{ var acc = 0; for (var i = 0; i < n; i++) { acc += i; } return acc; }";
        let prev = fingerprints(&alloc::format!("function sum(n) {body}"));
        let next = fingerprints(&alloc::format!("function total(n) {body}"));
        assert_eq!(match_functions(&prev, &next, 0.8), [Some(0)]);
    }

    #[test]
    fn test_short_bodies_match_by_name_only() {
        let prev = fingerprints("function a() { return 1; }");
        let next = fingerprints("function b() { return 2; }");
        assert!(prev[0].token_len < MIN_SIMILARITY_TOKENS);
        assert_eq!(match_functions(&prev, &next, 0.8), [None]);
    }

    #[test]
    fn test_greedy_prefers_higher_similarity() {
        let base = "{ var acc = 0; for (var i = 0; i < n; i++) { acc += i; } return acc; }";
        let variant =
            "{ var acc = 1; for (var i = 0; i < n; i++) { acc += i * i; } if (acc) { return acc; } }";
        let prev = fingerprints(&alloc::format!(
            "function one(n) {base}\nfunction two(n) {variant}"
        ));
        let next = fingerprints(&alloc::format!("function renamed(n) {base}"));
        assert_eq!(match_functions(&prev, &next, 0.5), [Some(0)]);
    }

    #[test]
    fn test_below_threshold_is_no_match() {
        let prev = fingerprints(
            "function parse(s) { var out = []; for (var i = 0; i < s.length; i++) { out.push(s[i]); } return out; }",
        );
        let next = fingerprints(
            "function render(t) { if (!t) { throw new Error('x'); } return t.map != null ? 1 : 2; }",
        );
        let sim = jaccard(&prev[0].trigrams, &next[0].trigrams);
        assert!(sim < 0.8, "fixture drifted: sim {sim}");
        assert_eq!(match_functions(&prev, &next, 0.8), [None]);
    }

    #[test]
    fn test_name_match_not_stolen_by_similarity() {
        // `f` persists by name; the renamed sibling must take the other slot.
        let body = "{ var acc = 0; for (var i = 0; i < n; i++) { acc += i; } return acc; }";
        let prev = fingerprints(&alloc::format!(
            "function f(n) {body}\nfunction old(n) {body}"
        ));
        let next = fingerprints(&alloc::format!(
            "function f(n) {body}\nfunction fresh(n) {body}"
        ));
        assert_eq!(match_functions(&prev, &next, 0.8), [Some(0), Some(1)]);
    }
}
