//! Token-based clone detection.
//!
//! Identifiers and literals are normalized away (`ID`/`LIT`), comments are
//! dropped, and every window of `clone_window` consecutive normalized tokens
//! is compared project-wide. A window occurring at least twice marks all its
//! positions as cloned; maximal runs of cloned positions form clone
//! *instances*, and instances with identical token content form clone
//! *classes*. Windows never span file boundaries.
//!
//! Per function: CI counts instances touching its lines, CCL the distinct
//! classes among them, LDC the function lines covered by an instance, and
//! CC/CLC the covered fraction of the span (identical under line-granular
//! coverage; both columns are kept). CCO adds one per instance plus one per
//! decision token inside it, a complexity-flavored weight of the duplicated
//! logic.

use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::{HashMap, HashSet};

use crate::lex::{Token, TokenKind};

use super::AnalyzedFile;

#[derive(Debug, Clone)]
pub struct NormToken {
    pub text: String,
    pub line: u32,
    /// Last line of the token; differs from `line` only for multi-line
    /// tokens such as templates.
    pub last_line: u32,
    /// True for tokens opening a decision point: `if`, `for`, `while`, `do`,
    /// `case`, `catch`, `?`.
    pub decision: bool,
}

#[derive(Debug, Clone, Default)]
pub struct NormTokens {
    pub tokens: Vec<NormToken>,
}

pub fn normalize_tokens(tokens: &[Token]) -> NormTokens {
    let normalized = tokens
        .iter()
        .filter(|t| !t.is_comment())
        .map(|t| {
            let text = match t.kind {
                TokenKind::Identifier => String::from("ID"),
                TokenKind::Literal => String::from("LIT"),
                _ => t.lexeme.clone(),
            };
            let decision =
                matches!(t.lexeme.as_str(), "if" | "for" | "while" | "do" | "case" | "catch" | "?");
            NormToken { text, line: t.span.start_line, last_line: t.span.end_line, decision }
        })
        .collect();
    NormTokens { tokens: normalized }
}

/// Positions whose window content occurs at least twice anywhere in the
/// project. `ids[f]` is file `f`'s interned normalized stream.
fn cloned_mask(ids: &[Vec<u32>], window: usize) -> Vec<Vec<bool>> {
    let mut groups: HashMap<&[u32], Vec<(usize, usize)>> = HashMap::new();
    for (fi, file_ids) in ids.iter().enumerate() {
        if file_ids.len() >= window {
            for p in 0..=file_ids.len() - window {
                groups.entry(&file_ids[p..p + window]).or_default().push((fi, p));
            }
        }
    }
    let mut mask: Vec<Vec<bool>> =
        ids.iter().map(|f| alloc::vec![false; f.len().saturating_sub(window - 1)]).collect();
    for occurrences in groups.values() {
        if occurrences.len() >= 2 {
            for &(fi, p) in occurrences {
                mask[fi][p] = true;
            }
        }
    }
    mask
}

#[derive(Debug, Clone, Copy)]
struct Instance {
    start_line: u32,
    end_line: u32,
    class_id: u32,
    /// 1 + decision tokens inside the instance.
    weight: u32,
}

/// Fills the six clone columns of every vector in the project.
pub fn clone_metrics(files: &mut [AnalyzedFile], window: usize) {
    debug_assert!(window >= 2);
    let ids: Vec<Vec<u32>> = {
        let mut interner: HashMap<&str, u32> = HashMap::new();
        files
            .iter()
            .map(|file| {
                file.norm_tokens
                    .tokens
                    .iter()
                    .map(|t| {
                        let next = interner.len() as u32;
                        *interner.entry(t.text.as_str()).or_insert(next)
                    })
                    .collect()
            })
            .collect()
    };

    let mask = cloned_mask(&ids, window);

    // Maximal runs of cloned positions become instances; identical content
    // joins a shared class.
    let mut class_ids: HashMap<&[u32], u32> = HashMap::new();
    let mut instances: Vec<Vec<Instance>> = Vec::with_capacity(files.len());
    for (fi, file_mask) in mask.iter().enumerate() {
        let mut file_instances = Vec::new();
        let mut p = 0usize;
        while p < file_mask.len() {
            if !file_mask[p] {
                p += 1;
                continue;
            }
            let mut q = p;
            while q + 1 < file_mask.len() && file_mask[q + 1] {
                q += 1;
            }
            let token_range = p..q + window;
            let content = &ids[fi][token_range.clone()];
            let next = class_ids.len() as u32;
            let class_id = *class_ids.entry(content).or_insert(next);
            let toks = &files[fi].norm_tokens.tokens;
            let weight = 1 + toks[token_range.clone()].iter().filter(|t| t.decision).count() as u32;
            file_instances.push(Instance {
                start_line: toks[p].line,
                end_line: toks[q + window - 1].last_line,
                class_id,
                weight,
            });
            p = q + 1;
        }
        instances.push(file_instances);
    }

    for (fi, file) in files.iter_mut().enumerate() {
        for (ri, vector) in file.vectors.iter_mut().enumerate() {
            let span = &file.records[ri].key.span;
            let mut ci = 0u32;
            let mut cco = 0u32;
            let mut classes: HashSet<u32> = HashSet::new();
            let mut covered: HashSet<u32> = HashSet::new();
            for inst in &instances[fi] {
                if inst.start_line <= span.end_line && span.start_line <= inst.end_line {
                    ci += 1;
                    cco += inst.weight;
                    classes.insert(inst.class_id);
                    let lo = inst.start_line.max(span.start_line);
                    let hi = inst.end_line.min(span.end_line);
                    covered.extend(lo..=hi);
                }
            }
            let ldc = covered.len() as u32;
            let ratio = ldc as f64 / span.line_count() as f64;
            vector.ci = ci as f64;
            vector.ccl = classes.len() as f64;
            vector.ldc = ldc as f64;
            vector.cc = ratio;
            vector.clc = ratio;
            vector.cco = cco as f64;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{analyze_project, MetricsConfig, StaticVector};
    use super::*;
    use crate::lex::tokenize;
    use alloc::string::ToString;
    use alloc::vec;

    fn project(window: usize, sources: &[(&str, &str)]) -> Vec<super::super::AnalyzedFile> {
        let owned: Vec<(String, String)> =
            sources.iter().map(|(p, s)| (p.to_string(), s.to_string())).collect();
        let mut config = MetricsConfig::default();
        config.clone_window = window;
        let files = analyze_project(&owned, &config).unwrap();
        for f in &files {
            assert!(!f.partial, "{:?}", f.diagnostics);
        }
        files
    }

    fn vector<'a>(
        files: &'a [super::super::AnalyzedFile],
        name: &str,
    ) -> &'a StaticVector {
        for file in files {
            for (ri, record) in file.records.iter().enumerate() {
                if record.key.qualified_name == name {
                    return &file.vectors[ri];
                }
            }
        }
        panic!("no record named {name}");
    }

    const PAIR: &str = "function first(a, b) {\n  const total = a + b;\n  return total * 2;\n}\nfunction second(c, d) {\n  const sum = c + d;\n  return sum * 2;\n}\n";

    #[test]
    fn test_identical_shapes_are_clones() {
        // Bodies differ only in identifier names, which normalize away.
        let files = project(8, &[("a.js", PAIR)]);
        let first = vector(&files, "first");
        let second = vector(&files, "second");
        assert!(first.ci >= 1.0);
        assert!(second.ci >= 1.0);
        assert!(first.cc > 0.0);
        assert_eq!(first.cc, first.clc);
        assert_eq!(first.ccl, 1.0, "one clone class");
    }

    #[test]
    fn test_consecutive_windows_merge_into_one_instance() {
        let files = project(8, &[("a.js", PAIR)]);
        // Each copy is one maximal run, not one instance per window position.
        assert_eq!(vector(&files, "first").ci, 1.0);
        assert_eq!(vector(&files, "second").ci, 1.0);
    }

    #[test]
    fn test_short_file_has_no_windows() {
        let files = project(50, &[("a.js", "function f() { return 1; }\n")]);
        let v = vector(&files, "f");
        assert_eq!((v.ci, v.ccl, v.ldc, v.cc, v.cco), (0.0, 0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn test_unique_code_has_no_clones() {
        let src = "function f(x) {\n  let a = x.alpha(1);\n  a += x.beta * 7;\n  if (a > 40) { a = x.gamma ** 2; }\n  return [a, x.delta, `t${a}`];\n}\n";
        let files = project(8, &[("a.js", src)]);
        assert_eq!(vector(&files, "f").ci, 0.0);
    }

    #[test]
    fn test_cross_file_clones() {
        let half_a = "function left(a, b) {\n  const total = a + b;\n  return total * 2;\n}\n";
        let half_b = "function right(c, d) {\n  const sum = c + d;\n  return sum * 2;\n}\n";
        let files = project(8, &[("a.js", half_a), ("b.js", half_b)]);
        assert!(vector(&files, "left").ci >= 1.0);
        assert!(vector(&files, "right").ci >= 1.0);
    }

    #[test]
    fn test_ldc_and_ratio_are_consistent() {
        let files = project(8, &[("a.js", PAIR)]);
        let v = vector(&files, "first");
        let loc = 4.0;
        assert!(v.ldc >= 1.0 && v.ldc <= loc);
        assert_eq!(v.cc, v.ldc / loc);
    }

    #[test]
    fn test_cco_counts_decisions() {
        let body = "  if (a > 0) { b = a ? 1 : 2; }\n  return b + a + 1;\n";
        let src = alloc::format!(
            "function one(a, b) {{\n{body}}}\nfunction two(a, b) {{\n{body}}}\n"
        );
        let files = project(8, &[("a.js", &src)]);
        let v = vector(&files, "one");
        assert_eq!(v.ci, 1.0);
        // One instance holding `if` and `?`: weight 1 + 2.
        assert_eq!(v.cco, 3.0);
    }

    #[test]
    fn test_windows_never_span_files() {
        // The shared content is shorter than the window in each file, so even
        // though concatenation would repeat, nothing is flagged.
        let src_a = "const a = 1 + 2 + 3;\n";
        let src_b = "const b = 1 + 2 + 3;\nconst c = 1 + 2 + 3;\n";
        let files = project(12, &[("a.js", src_a), ("b.js", src_b)]);
        for file in &files {
            for v in &file.vectors {
                assert_eq!(v.ci, 0.0);
            }
        }
    }

    #[test]
    fn test_mask_matches_brute_force() {
        let window = 6;
        let sources = [
            "function f(a) {\n  const x = a + 1;\n  const y = a + 2;\n  return x * y;\n}\n",
            "function g(b) {\n  const u = b + 1;\n  const v = b + 2;\n  return u * v;\n}\nfunction h() { return 1 + 2; }\n",
        ];
        let streams: Vec<NormTokens> =
            sources.iter().map(|s| normalize_tokens(&tokenize(s).tokens)).collect();

        // Independent path: compare raw normalized text slices pairwise.
        let texts: Vec<Vec<&str>> = streams
            .iter()
            .map(|s| s.tokens.iter().map(|t| t.text.as_str()).collect())
            .collect();
        let mut expected: Vec<Vec<bool>> = texts
            .iter()
            .map(|t| vec![false; t.len().saturating_sub(window - 1)])
            .collect();
        for fa in 0..texts.len() {
            for pa in 0..expected[fa].len() {
                for fb in 0..texts.len() {
                    for pb in 0..expected[fb].len() {
                        if (fa, pa) != (fb, pb)
                            && texts[fa][pa..pa + window] == texts[fb][pb..pb + window]
                        {
                            expected[fa][pa] = true;
                        }
                    }
                }
            }
        }

        let mut interner: HashMap<&str, u32> = HashMap::new();
        let ids: Vec<Vec<u32>> = texts
            .iter()
            .map(|t| {
                t.iter()
                    .map(|w| {
                        let next = interner.len() as u32;
                        *interner.entry(w).or_insert(next)
                    })
                    .collect()
            })
            .collect();
        assert_eq!(cloned_mask(&ids, window), expected);
        assert!(expected.iter().flatten().any(|b| *b), "fixture should contain clones");
    }

    #[test]
    fn test_normalization() {
        let stream = tokenize("if (count > 10) { go('x'); } // note\n");
        let norm = normalize_tokens(&stream.tokens);
        let texts: Vec<&str> = norm.tokens.iter().map(|t| t.text.as_str()).collect();
        assert_eq!(
            texts,
            ["if", "(", "ID", ">", "LIT", ")", "{", "ID", "(", "LIT", ")", ";", "}"]
        );
        assert!(norm.tokens[0].decision);
        assert!(!norm.tokens[2].decision);
    }
}
