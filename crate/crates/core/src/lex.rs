//! Pragmatic ES2017 tokenizer.
//!
//! The goal is faithful token streams for metric computation, not a full
//! spec-grade scanner. Template literals are lexed as chunk tokens so the
//! expressions inside interpolations surface as ordinary tokens. The classic
//! regex-vs-division ambiguity is resolved with the usual previous-token
//! heuristic. Malformed input never aborts a file: the scanner records a
//! diagnostic, resynchronizes at the next newline, and marks the stream as
//! partially tokenized.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::span::SourceSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TokenKind {
    Identifier,
    Literal,
    Keyword,
    Operator,
    Punctuation,
    Comment,
}

/// Finer grain than [`TokenKind`], needed by the parser and the clone
/// normalizer but not part of the stable stream contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TokenDetail {
    None,
    Number,
    String,
    Regex,
    /// Opens a template: `` `text${ ``
    TemplateHead,
    /// Continues one: `}text${`
    TemplateMiddle,
    /// Closes one: `` }text` ``
    TemplateTail,
    /// A template without interpolations: `` `text` ``
    TemplateFull,
    LineComment,
    BlockComment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Token {
    pub kind: TokenKind,
    pub detail: TokenDetail,
    pub lexeme: String,
    pub span: SourceSpan,
    /// True when a line terminator (possibly inside a comment) separates this
    /// token from the previous non-comment token. Drives semicolon inference.
    pub newline_before: bool,
}

impl Token {
    pub fn is_comment(&self) -> bool {
        self.kind == TokenKind::Comment
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiagnosticKind {
    UnterminatedString,
    UnterminatedComment,
    UnterminatedTemplate,
    UnterminatedRegex,
    UnexpectedChar,
    ParseError,
    UnsupportedSyntax,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub span: SourceSpan,
    pub message: String,
}

/// Lexer output: the full token sequence (comments included) plus anything
/// that went wrong along the way.
#[derive(Debug, Clone, Default)]
pub struct TokenStream {
    pub tokens: Vec<Token>,
    pub diagnostics: Vec<Diagnostic>,
}

impl TokenStream {
    /// True when recovery kicked in and downstream consumers may be looking
    /// at an approximation of the source.
    pub fn partially_tokenized(&self) -> bool {
        !self.diagnostics.is_empty()
    }
}

/// Reserved words recognized as [`TokenKind::Keyword`]. Contextual keywords
/// (`async`, `of`, `get`, `set`, `static`) lex as identifiers; the parser
/// gives them meaning by position.
const KEYWORDS: &[&str] = &[
    "await", "break", "case", "catch", "class", "const", "continue", "debugger", "default",
    "delete", "do", "else", "export", "extends", "false", "finally", "for", "function", "if",
    "import", "in", "instanceof", "let", "new", "null", "return", "super", "switch", "this",
    "throw", "true", "try", "typeof", "var", "void", "while", "with", "yield",
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.binary_search(&word).is_ok()
}

/// Multi-character operators, longest first so maximal munch is a plain scan.
const OPERATORS: &[&str] = &[
    ">>>=", "...", "===", "!==", "**=", "<<=", ">>=", ">>>", "&&", "||", "??", "?.", "=>", "==",
    "!=", "<=", ">=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>", "**", "++",
    "--", "+", "-", "*", "/", "%", "=", "<", ">", "!", "~", "&", "|", "^", "?", ":", ".",
];

fn punctuation_char(c: char) -> bool {
    matches!(c, '(' | ')' | '[' | ']' | '{' | '}' | ';' | ',')
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    line_start: usize,
    saw_newline: bool,
    tokens: Vec<Token>,
    diagnostics: Vec<Diagnostic>,
    /// One entry per open template interpolation; the value is the count of
    /// unmatched `{` seen inside it. When a `}` arrives with a zero top we are
    /// back in template text.
    template_stack: Vec<u32>,
}

pub fn tokenize(src: &str) -> TokenStream {
    let mut lx = Lexer {
        src,
        pos: 0,
        line: 1,
        line_start: 0,
        saw_newline: false,
        tokens: Vec::new(),
        diagnostics: Vec::new(),
        template_stack: Vec::new(),
    };
    lx.run();
    TokenStream { tokens: lx.tokens, diagnostics: lx.diagnostics }
}

impl<'a> Lexer<'a> {
    fn run(&mut self) {
        // A shebang line is treated as a comment so scripts lex cleanly.
        if self.src.starts_with("#!") {
            let start = self.mark();
            while self.peek().is_some_and(|c| c != '\n') {
                self.bump();
            }
            self.emit_from(start, TokenKind::Comment, TokenDetail::LineComment);
        }
        while let Some(c) = self.peek() {
            if c == '\n' {
                self.bump();
                self.newline();
                continue;
            }
            if c == '\r' {
                self.bump();
                if self.peek() == Some('\n') {
                    self.bump();
                }
                self.newline();
                continue;
            }
            if c.is_whitespace() || c == '\u{feff}' {
                self.bump();
                continue;
            }
            self.scan_token(c);
        }
    }

    fn scan_token(&mut self, c: char) {
        let start = self.mark();
        match c {
            '/' => {
                if self.peek_at(1) == Some('/') {
                    self.scan_line_comment(start);
                } else if self.peek_at(1) == Some('*') {
                    self.scan_block_comment(start);
                } else if self.regex_allowed() {
                    self.scan_regex(start);
                } else {
                    self.scan_operator(start);
                }
            }
            '\'' | '"' => self.scan_string(start, c),
            '`' => self.scan_template(start, true),
            '{' => {
                if let Some(depth) = self.template_stack.last_mut() {
                    *depth += 1;
                }
                self.bump();
                self.emit_from(start, TokenKind::Punctuation, TokenDetail::None);
            }
            '}' => {
                if self.template_stack.last() == Some(&0) {
                    self.template_stack.pop();
                    self.scan_template(start, false);
                } else {
                    if let Some(depth) = self.template_stack.last_mut() {
                        *depth -= 1;
                    }
                    self.bump();
                    self.emit_from(start, TokenKind::Punctuation, TokenDetail::None);
                }
            }
            _ if punctuation_char(c) => {
                self.bump();
                self.emit_from(start, TokenKind::Punctuation, TokenDetail::None);
            }
            _ if c.is_ascii_digit() => self.scan_number(start),
            '.' => {
                if self.peek_at(1).is_some_and(|d| d.is_ascii_digit()) {
                    self.scan_number(start);
                } else {
                    self.scan_operator(start);
                }
            }
            _ if ident_start(c) => self.scan_word(start),
            _ => {
                if self.try_scan_operator(start) {
                    return;
                }
                self.bump();
                self.diag(
                    DiagnosticKind::UnexpectedChar,
                    start,
                    &alloc::format!("unexpected character {c:?}"),
                );
                self.emit_from(start, TokenKind::Punctuation, TokenDetail::None);
            }
        }
    }

    fn scan_word(&mut self, start: Mark) {
        // The leading character passed `ident_start` but may fail
        // `ident_continue` (`#` in private names): consume it unconditionally.
        self.bump();
        while self.peek().is_some_and(ident_continue) {
            self.bump();
        }
        let text = &self.src[start.pos..self.pos];
        let kind = if is_keyword(text) { TokenKind::Keyword } else { TokenKind::Identifier };
        self.emit_from(start, kind, TokenDetail::None);
    }

    fn scan_number(&mut self, start: Mark) {
        let radix_prefix = self.peek() == Some('0')
            && matches!(self.peek_at(1), Some('x' | 'X' | 'o' | 'O' | 'b' | 'B'));
        if radix_prefix {
            self.bump();
            self.bump();
            while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
                self.bump();
            }
        } else {
            while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '_') {
                self.bump();
            }
            if self.peek() == Some('.') {
                self.bump();
                while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '_') {
                    self.bump();
                }
            }
            if matches!(self.peek(), Some('e' | 'E')) {
                let mut ahead = 1;
                if matches!(self.peek_at(1), Some('+' | '-')) {
                    ahead = 2;
                }
                if self.peek_at(ahead).is_some_and(|c| c.is_ascii_digit()) {
                    for _ in 0..=ahead {
                        self.bump();
                    }
                    while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                        self.bump();
                    }
                }
            }
        }
        if self.peek() == Some('n') {
            self.bump(); // BigInt suffix
        }
        self.emit_from(start, TokenKind::Literal, TokenDetail::Number);
    }

    fn scan_string(&mut self, start: Mark, quote: char) {
        self.bump();
        loop {
            match self.peek() {
                None => {
                    self.diag(DiagnosticKind::UnterminatedString, start, "unterminated string");
                    break;
                }
                Some('\n') | Some('\r') => {
                    self.diag(DiagnosticKind::UnterminatedString, start, "unterminated string");
                    break;
                }
                Some('\\') => {
                    self.bump();
                    // Escaped line terminators are legal continuations.
                    if self.peek() == Some('\r') {
                        self.bump();
                        if self.peek() == Some('\n') {
                            self.bump();
                        }
                        self.newline_inside_token();
                    } else if self.peek() == Some('\n') {
                        self.bump();
                        self.newline_inside_token();
                    } else if self.peek().is_some() {
                        self.bump();
                    }
                }
                Some(c) if c == quote => {
                    self.bump();
                    break;
                }
                Some(_) => {
                    self.bump();
                }
            }
        }
        self.emit_from(start, TokenKind::Literal, TokenDetail::String);
    }

    /// Scans template text starting at `` ` `` (opening = true) or at the `}`
    /// that terminates an interpolation (opening = false). Emits one chunk
    /// token and pushes interpolation state when the chunk ends in `${`.
    fn scan_template(&mut self, start: Mark, opening: bool) {
        self.bump(); // backtick or closing brace
        let mut interpolates = false;
        loop {
            match self.peek() {
                None => {
                    self.diag(
                        DiagnosticKind::UnterminatedTemplate,
                        start,
                        "unterminated template literal",
                    );
                    break;
                }
                Some('`') => {
                    self.bump();
                    break;
                }
                Some('$') if self.peek_at(1) == Some('{') => {
                    self.bump();
                    self.bump();
                    interpolates = true;
                    self.template_stack.push(0);
                    break;
                }
                Some('\\') => {
                    self.bump();
                    if self.peek().is_some() {
                        if self.peek() == Some('\n') {
                            self.bump();
                            self.newline_inside_token();
                        } else {
                            self.bump();
                        }
                    }
                }
                Some('\n') => {
                    self.bump();
                    self.newline_inside_token();
                }
                Some(_) => {
                    self.bump();
                }
            }
        }
        let detail = match (opening, interpolates) {
            (true, true) => TokenDetail::TemplateHead,
            (true, false) => TokenDetail::TemplateFull,
            (false, true) => TokenDetail::TemplateMiddle,
            (false, false) => TokenDetail::TemplateTail,
        };
        self.emit_from(start, TokenKind::Literal, detail);
    }

    fn scan_regex(&mut self, start: Mark) {
        self.bump(); // opening slash
        let mut in_class = false;
        loop {
            match self.peek() {
                None | Some('\n') | Some('\r') => {
                    self.diag(DiagnosticKind::UnterminatedRegex, start, "unterminated regex");
                    break;
                }
                Some('\\') => {
                    self.bump();
                    if self.peek().is_some_and(|c| c != '\n' && c != '\r') {
                        self.bump();
                    }
                }
                Some('[') => {
                    in_class = true;
                    self.bump();
                }
                Some(']') => {
                    in_class = false;
                    self.bump();
                }
                Some('/') if !in_class => {
                    self.bump();
                    while self.peek().is_some_and(|c| c.is_ascii_alphabetic()) {
                        self.bump();
                    }
                    break;
                }
                Some(_) => {
                    self.bump();
                }
            }
        }
        self.emit_from(start, TokenKind::Literal, TokenDetail::Regex);
    }

    fn scan_line_comment(&mut self, start: Mark) {
        while self.peek().is_some_and(|c| c != '\n' && c != '\r') {
            self.bump();
        }
        self.emit_from(start, TokenKind::Comment, TokenDetail::LineComment);
    }

    fn scan_block_comment(&mut self, start: Mark) {
        self.bump();
        self.bump();
        loop {
            match self.peek() {
                None => {
                    // Recovery contract: the malformed token ends at the next
                    // newline (here, EOF) and scanning resumes after it.
                    self.diag(DiagnosticKind::UnterminatedComment, start, "unterminated comment");
                    break;
                }
                Some('*') if self.peek_at(1) == Some('/') => {
                    self.bump();
                    self.bump();
                    break;
                }
                Some('\n') => {
                    self.bump();
                    self.newline_inside_token();
                }
                Some(_) => {
                    self.bump();
                }
            }
        }
        self.emit_from(start, TokenKind::Comment, TokenDetail::BlockComment);
    }

    fn scan_operator(&mut self, start: Mark) {
        if !self.try_scan_operator(start) {
            // Unreachable in practice: callers check the leading char.
            self.bump();
            self.emit_from(start, TokenKind::Operator, TokenDetail::None);
        }
    }

    fn try_scan_operator(&mut self, start: Mark) -> bool {
        let rest = &self.src[self.pos..];
        for op in OPERATORS {
            if rest.starts_with(op) {
                for _ in 0..op.len() {
                    self.bump();
                }
                self.emit_from(start, TokenKind::Operator, TokenDetail::None);
                return true;
            }
        }
        false
    }

    /// Division-vs-regex disambiguation from the last non-comment token.
    fn regex_allowed(&self) -> bool {
        let prev = self.tokens.iter().rev().find(|t| !t.is_comment());
        match prev {
            None => true,
            Some(t) => match t.kind {
                TokenKind::Operator => true,
                TokenKind::Punctuation => !matches!(t.lexeme.as_str(), ")" | "]" | "}"),
                TokenKind::Keyword => !matches!(t.lexeme.as_str(), "this" | "super"),
                TokenKind::Identifier | TokenKind::Literal => false,
                TokenKind::Comment => false,
            },
        }
    }

    // Cursor plumbing.

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(n)
    }

    fn bump(&mut self) {
        if let Some(c) = self.peek() {
            self.pos += c.len_utf8();
        }
    }

    fn newline(&mut self) {
        self.line += 1;
        self.line_start = self.pos;
        self.saw_newline = true;
    }

    /// Line bookkeeping for newlines consumed inside a multi-line token.
    fn newline_inside_token(&mut self) {
        self.line += 1;
        self.line_start = self.pos;
    }

    fn mark(&self) -> Mark {
        Mark { pos: self.pos, line: self.line, col: (self.pos - self.line_start) as u32 }
    }

    fn emit_from(&mut self, start: Mark, kind: TokenKind, detail: TokenDetail) {
        let span = SourceSpan::new(
            start.line,
            start.col,
            self.line,
            (self.pos - self.line_start) as u32,
        );
        let newline_before = self.saw_newline || self.tokens.is_empty();
        // Comments keep the pending-newline state alive for the next real
        // token; a comment containing a newline also introduces one.
        if kind != TokenKind::Comment {
            self.saw_newline = false;
        } else if span.end_line > span.start_line {
            self.saw_newline = true;
        }
        self.tokens.push(Token {
            kind,
            detail,
            lexeme: self.src[start.pos..self.pos].to_string(),
            span,
            newline_before,
        });
    }

    // Unterminated-token scanners stop before the offending newline, so
    // recording the diagnostic is all recovery takes: the next iteration of
    // `run` resumes at the line boundary.
    fn diag(&mut self, kind: DiagnosticKind, at: Mark, message: &str) {
        self.diagnostics.push(Diagnostic {
            kind,
            span: SourceSpan::point(at.line, at.col),
            message: message.to_string(),
        });
    }
}

#[derive(Clone, Copy)]
struct Mark {
    pos: usize,
    line: u32,
    col: u32,
}

fn ident_start(c: char) -> bool {
    c == '_' || c == '$' || c == '#' || c.is_alphabetic()
}

fn ident_continue(c: char) -> bool {
    c == '_' || c == '$' || c.is_alphanumeric()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn kinds(src: &str) -> Vec<(TokenKind, String)> {
        tokenize(src).tokens.into_iter().map(|t| (t.kind, t.lexeme)).collect()
    }

    #[test]
    fn test_function_header_tokens() {
        use TokenKind::*;
        assert_eq!(
            kinds("function f(){}"),
            vec![
                (Keyword, "function".to_string()),
                (Identifier, "f".to_string()),
                (Punctuation, "(".to_string()),
                (Punctuation, ")".to_string()),
                (Punctuation, "{".to_string()),
                (Punctuation, "}".to_string()),
            ]
        );
    }

    #[test]
    fn test_keywords_are_sorted_for_binary_search() {
        let mut sorted = KEYWORDS.to_vec();
        sorted.sort_unstable();
        assert_eq!(sorted, KEYWORDS);
    }

    #[test]
    fn test_string_and_number_literals() {
        let toks = kinds("const x = 'a\\'b' + 0x1F + .5e-2;");
        let literals: Vec<_> =
            toks.iter().filter(|(k, _)| *k == TokenKind::Literal).map(|(_, l)| l.clone()).collect();
        assert_eq!(literals, vec!["'a\\'b'", "0x1F", ".5e-2"]);
    }

    #[test]
    fn test_regex_vs_division() {
        let toks = kinds("a = b / c; if (x) { } r = /ab[/]c/gi;");
        assert!(toks.iter().any(|(k, l)| *k == TokenKind::Literal && l == "/ab[/]c/gi"));
        assert!(toks.iter().any(|(k, l)| *k == TokenKind::Operator && l == "/"));
    }

    #[test]
    fn test_regex_after_return() {
        let toks = kinds("return /x/;");
        assert!(toks.iter().any(|(k, l)| *k == TokenKind::Literal && l == "/x/"));
    }

    #[test]
    fn test_template_interpolation_exposes_inner_tokens() {
        let toks = kinds("`a ${x + 1} b`");
        let lexemes: Vec<_> = toks.iter().map(|(_, l)| l.as_str()).collect();
        assert_eq!(lexemes, vec!["`a ${", "x", "+", "1", "} b`"]);
        assert_eq!(toks[0].0, TokenKind::Literal);
        assert_eq!(toks[4].0, TokenKind::Literal);
    }

    #[test]
    fn test_nested_template_braces() {
        let toks = kinds("`${ {a: 1} }`");
        let lexemes: Vec<_> = toks.iter().map(|(_, l)| l.as_str()).collect();
        assert_eq!(lexemes, vec!["`${", "{", "a", ":", "1", "}", "}`"]);
    }

    #[test]
    fn test_comments_retained() {
        let stream = tokenize("// note\nx /* block */ = 1;");
        let comments: Vec<_> =
            stream.tokens.iter().filter(|t| t.is_comment()).map(|t| t.lexeme.clone()).collect();
        assert_eq!(comments, vec!["// note", "/* block */"]);
        assert!(!stream.partially_tokenized());
    }

    #[test]
    fn test_unterminated_string_recovers_at_newline() {
        let stream = tokenize("var a = 'oops\nvar b = 2;");
        assert!(stream.partially_tokenized());
        assert_eq!(stream.diagnostics[0].kind, DiagnosticKind::UnterminatedString);
        assert_eq!(stream.diagnostics[0].span.start_line, 1);
        // Scanning resumed on line 2.
        assert!(stream.tokens.iter().any(|t| t.lexeme == "b" && t.span.start_line == 2));
    }

    #[test]
    fn test_unterminated_block_comment_flags_stream() {
        let stream = tokenize("/* never closed");
        assert!(stream.partially_tokenized());
        assert_eq!(stream.diagnostics[0].kind, DiagnosticKind::UnterminatedComment);
    }

    #[test]
    fn test_every_non_whitespace_char_is_covered() {
        let src = "function f(a, b) {\n  return a * (b + 1); // done\n}\n";
        let stream = tokenize(src);
        let total_token_bytes: usize = stream.tokens.iter().map(|t| t.lexeme.len()).sum();
        let non_ws_bytes =
            src.chars().filter(|c| !c.is_whitespace()).map(|c| c.len_utf8()).sum::<usize>();
        // Tokens may contain internal whitespace (comments, strings), so
        // compare against the total minus whitespace outside tokens.
        let ws_inside_tokens: usize = stream
            .tokens
            .iter()
            .flat_map(|t| t.lexeme.chars())
            .filter(|c| c.is_whitespace())
            .map(|c| c.len_utf8())
            .sum();
        assert_eq!(total_token_bytes - ws_inside_tokens, non_ws_bytes);
    }

    #[test]
    fn test_newline_before_flag() {
        let stream = tokenize("a\nb c");
        let toks = stream.tokens;
        assert!(toks[0].newline_before);
        assert!(toks[1].newline_before);
        assert!(!toks[2].newline_before);
    }

    #[test]
    fn test_newline_inside_block_comment_counts_for_asi() {
        let stream = tokenize("a /* x\ny */ b");
        let b = stream.tokens.iter().find(|t| t.lexeme == "b").unwrap();
        assert!(b.newline_before);
    }

    #[test]
    fn test_spans_are_ordered_and_nonoverlapping() {
        let stream = tokenize("let x = `multi\nline ${y}` + 2;\n");
        let mut prev_end = (0u32, 0u32);
        for t in &stream.tokens {
            let start = (t.span.start_line, t.span.start_col);
            let end = (t.span.end_line, t.span.end_col);
            assert!(start >= prev_end, "token {t:?} overlaps previous");
            assert!(end >= start);
            prev_end = end;
        }
    }

    #[test]
    fn test_shebang_is_comment() {
        let stream = tokenize("#!/usr/bin/env node\nlet x = 1;");
        assert_eq!(stream.tokens[0].kind, TokenKind::Comment);
        assert!(stream.tokens.iter().any(|t| t.lexeme == "x"));
    }
}
