//! Recursive-descent / precedence-climbing parser over the token stream.
//!
//! Parsing is tolerant by design: a syntax error records a diagnostic and
//! resynchronizes at the next statement boundary (`;`, a balanced `}`, or a
//! statement keyword), so one bad region never sinks a file. Sources that
//! look like JSX or TypeScript get an `UnsupportedSyntax` diagnostic instead
//! of a misleading parse.
//!
//! Semicolon inference is pragmatic: a missing `;` is accepted at `}`, end of
//! input, or a line break. Restricted productions (`return`, `throw`,
//! `break`, `continue`, postfix `++`/`--`) respect the preceding-newline rule.

use alloc::borrow::ToOwned;
use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::lex::{Diagnostic, DiagnosticKind, Token, TokenDetail, TokenKind, TokenStream};
use crate::span::SourceSpan;

use super::ast::*;

#[derive(Debug, Clone, Default)]
pub struct ParseOutcome {
    pub program: Program,
    pub diagnostics: Vec<Diagnostic>,
}

/// Parses pre-lexed tokens. Comments are skipped here; they remain available
/// in the originating [`TokenStream`].
pub fn parse(stream: &TokenStream) -> ParseOutcome {
    let toks: Vec<&Token> = stream.tokens.iter().filter(|t| !t.is_comment()).collect();
    let mut parser = Parser { toks, pos: 0, limit_stack: Vec::new(), diagnostics: Vec::new() };
    let program = parser.parse_program();
    ParseOutcome { program, diagnostics: parser.diagnostics }
}

type PResult<T> = Result<T, ()>;

struct Parser<'a> {
    toks: Vec<&'a Token>,
    pos: usize,
    /// Temporary hard bounds used when parsing a pre-scanned region (for-head
    /// sections, arrow parameter lists). `peek` acts as if tokens at or past
    /// the innermost limit do not exist.
    limit_stack: Vec<usize>,
    diagnostics: Vec<Diagnostic>,
}

impl<'a> Parser<'a> {
    // Cursor helpers -------------------------------------------------------

    fn limit(&self) -> usize {
        self.limit_stack.last().copied().unwrap_or(self.toks.len())
    }

    fn peek(&self) -> Option<&'a Token> {
        if self.pos < self.limit() {
            Some(self.toks[self.pos])
        } else {
            None
        }
    }

    fn peek_at(&self, k: usize) -> Option<&'a Token> {
        if self.pos + k < self.limit() {
            Some(self.toks[self.pos + k])
        } else {
            None
        }
    }

    fn at(&self, lexeme: &str) -> bool {
        self.peek().is_some_and(|t| t.lexeme == lexeme)
    }

    fn bump(&mut self) -> Option<&'a Token> {
        let t = self.peek();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, lexeme: &str) -> bool {
        if self.at(lexeme) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, lexeme: &str) -> PResult<&'a Token> {
        match self.peek() {
            Some(t) if t.lexeme == lexeme => {
                self.pos += 1;
                Ok(t)
            }
            other => {
                let found =
                    other.map(|t| format!("`{}`", t.lexeme)).unwrap_or_else(|| "end of input".into());
                self.error(format!("expected `{lexeme}`, found {found}"));
                Err(())
            }
        }
    }

    fn cur_span(&self) -> SourceSpan {
        match self.peek() {
            Some(t) => t.span,
            None => self
                .toks
                .last()
                .map(|t| SourceSpan::point(t.span.end_line, t.span.end_col))
                .unwrap_or_else(|| SourceSpan::point(1, 0)),
        }
    }

    fn prev_span(&self) -> SourceSpan {
        if self.pos > 0 {
            self.toks[self.pos - 1].span
        } else {
            SourceSpan::point(1, 0)
        }
    }

    fn span_from(&self, start: SourceSpan) -> SourceSpan {
        start.cover(&self.prev_span())
    }

    fn error(&mut self, message: String) {
        let span = self.cur_span();
        self.diagnostics.push(Diagnostic { kind: DiagnosticKind::ParseError, span, message });
    }

    fn unsupported(&mut self, message: &str) {
        let span = self.cur_span();
        self.diagnostics.push(Diagnostic {
            kind: DiagnosticKind::UnsupportedSyntax,
            span,
            message: message.to_owned(),
        });
    }

    /// Index of the token matching the opening bracket at `open` (within the
    /// current limit), counting all three bracket kinds.
    fn matching_bracket(&self, open: usize) -> Option<usize> {
        let mut depth = 0usize;
        let mut i = open;
        while i < self.limit() {
            match self.toks[i].lexeme.as_str() {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => {
                    depth = depth.checked_sub(1)?;
                    if depth == 0 {
                        return Some(i);
                    }
                }
                _ => {}
            }
            i += 1;
        }
        None
    }

    // Statements -----------------------------------------------------------

    fn parse_program(&mut self) -> Program {
        let mut body = Vec::new();
        while self.peek().is_some() {
            let before = self.pos;
            match self.parse_statement() {
                Ok(stmt) => body.push(stmt),
                Err(()) => {
                    if self.pos == before {
                        self.pos += 1;
                    }
                    self.synchronize();
                }
            }
        }
        Program { body }
    }

    /// Panic-mode recovery: skip (balanced) tokens until a statement boundary.
    fn synchronize(&mut self) {
        let mut depth = 0usize;
        while let Some(t) = self.peek() {
            match t.lexeme.as_str() {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => {
                    if depth == 0 {
                        return;
                    }
                    depth -= 1;
                }
                ";" => {
                    if depth == 0 {
                        self.pos += 1;
                        return;
                    }
                }
                "function" | "class" | "if" | "for" | "while" | "do" | "switch" | "try"
                | "return" | "var" | "let" | "const" => {
                    if depth == 0 {
                        return;
                    }
                }
                _ => {}
            }
            self.pos += 1;
        }
    }

    /// Accepts an explicit `;` or infers one at `}`, end of input, or a line
    /// break before the next token.
    fn expect_semicolon(&mut self) {
        if self.eat(";") {
            return;
        }
        match self.peek() {
            None => {}
            Some(t) if t.lexeme == "}" || t.newline_before => {}
            Some(t) => {
                let lexeme = t.lexeme.clone();
                self.error(format!("expected `;`, found `{lexeme}`"));
                // Do not consume: the offending token likely starts the next
                // statement and recovery happens at the caller.
            }
        }
    }

    fn parse_statement(&mut self) -> PResult<Stmt> {
        let Some(tok) = self.peek() else {
            return Err(());
        };
        let start = tok.span;
        match (tok.kind, tok.lexeme.as_str()) {
            (TokenKind::Punctuation, "{") => self.parse_block_stmt(),
            (TokenKind::Punctuation, ";") => {
                self.pos += 1;
                Ok(Stmt::Empty { span: start })
            }
            (TokenKind::Keyword, "var") => self.parse_var_stmt(VarKind::Var),
            (TokenKind::Keyword, "let") => self.parse_var_stmt(VarKind::Let),
            (TokenKind::Keyword, "const") => self.parse_var_stmt(VarKind::Const),
            (TokenKind::Keyword, "function") => {
                let def = self.parse_function_tail(start, false, FnKind::Declaration)?;
                Ok(Stmt::FunctionDecl(def))
            }
            (TokenKind::Identifier, "async")
                if self.peek_at(1).is_some_and(|t| {
                    t.lexeme == "function" && !t.newline_before
                }) =>
            {
                self.pos += 1;
                let def = self.parse_function_tail(start, true, FnKind::Declaration)?;
                Ok(Stmt::FunctionDecl(def))
            }
            (TokenKind::Keyword, "class") => {
                let def = self.parse_class(start)?;
                Ok(Stmt::ClassDecl(def))
            }
            (TokenKind::Keyword, "if") => self.parse_if(start),
            (TokenKind::Keyword, "for") => self.parse_for(start),
            (TokenKind::Keyword, "while") => self.parse_while(start),
            (TokenKind::Keyword, "do") => self.parse_do_while(start),
            (TokenKind::Keyword, "switch") => self.parse_switch(start),
            (TokenKind::Keyword, "try") => self.parse_try(start),
            (TokenKind::Keyword, "return") => {
                self.pos += 1;
                let arg = if self.stmt_arg_follows() { Some(self.parse_expression()?) } else { None };
                self.expect_semicolon();
                Ok(Stmt::Return { arg, span: self.span_from(start) })
            }
            (TokenKind::Keyword, "throw") => {
                self.pos += 1;
                let arg = if self.stmt_arg_follows() {
                    Some(self.parse_expression()?)
                } else {
                    self.error("`throw` requires an argument on the same line".into());
                    None
                };
                self.expect_semicolon();
                Ok(Stmt::Throw { arg, span: self.span_from(start) })
            }
            (TokenKind::Keyword, "break") => {
                self.pos += 1;
                let label = self.parse_optional_label();
                self.expect_semicolon();
                Ok(Stmt::Break { label, span: self.span_from(start) })
            }
            (TokenKind::Keyword, "continue") => {
                self.pos += 1;
                let label = self.parse_optional_label();
                self.expect_semicolon();
                Ok(Stmt::Continue { label, span: self.span_from(start) })
            }
            (TokenKind::Keyword, "debugger") => {
                self.pos += 1;
                self.expect_semicolon();
                Ok(Stmt::Debugger { span: self.span_from(start) })
            }
            (TokenKind::Keyword, "with") => {
                self.pos += 1;
                self.expect("(")?;
                let object = self.parse_expression()?;
                self.expect(")")?;
                let body = Box::new(self.parse_statement()?);
                Ok(Stmt::With { object, body, span: self.span_from(start) })
            }
            (TokenKind::Keyword, "import")
                if !self.peek_at(1).is_some_and(|t| t.lexeme == "(") =>
            {
                self.pos += 1;
                self.skip_simple_statement();
                Ok(Stmt::Import { span: self.span_from(start) })
            }
            (TokenKind::Keyword, "export") => self.parse_export(start),
            (TokenKind::Keyword, "else") => {
                self.error("`else` without matching `if`".into());
                self.pos += 1;
                Err(())
            }
            (TokenKind::Keyword, "case" | "default") => {
                self.error(format!("`{}` outside of switch", tok.lexeme));
                self.pos += 1;
                Err(())
            }
            (TokenKind::Identifier, _)
                if self.peek_at(1).is_some_and(|t| t.lexeme == ":")
                    // `a ? b : c` never reaches here; `:` directly after an
                    // identifier at statement level means a label.
                    =>
            {
                let label = tok.lexeme.clone();
                self.pos += 2;
                let body = Box::new(self.parse_statement()?);
                Ok(Stmt::Labeled { label, body, span: self.span_from(start) })
            }
            _ => {
                let expr = self.parse_expression()?;
                self.expect_semicolon();
                Ok(Stmt::Expr { expr, span: self.span_from(start) })
            }
        }
    }

    /// True when a restricted-production argument may follow on this line.
    fn stmt_arg_follows(&self) -> bool {
        match self.peek() {
            None => false,
            Some(t) => !t.newline_before && t.lexeme != ";" && t.lexeme != "}",
        }
    }

    fn parse_optional_label(&mut self) -> Option<String> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Identifier && !t.newline_before => {
                self.pos += 1;
                Some(t.lexeme.clone())
            }
            _ => None,
        }
    }

    /// Consumes a loosely structured statement (imports, export lists) up to
    /// `;`, a line break, a closing brace, or end of input.
    fn skip_simple_statement(&mut self) {
        let mut depth = 0usize;
        while let Some(t) = self.peek() {
            match t.lexeme.as_str() {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" => {
                    if depth == 0 {
                        return;
                    }
                    depth -= 1;
                }
                "}" => {
                    if depth == 0 {
                        return;
                    }
                    depth -= 1;
                }
                ";" => {
                    if depth == 0 {
                        self.pos += 1;
                        return;
                    }
                }
                _ if depth == 0 && t.newline_before => return,
                _ => {}
            }
            self.pos += 1;
        }
    }

    fn parse_export(&mut self, start: SourceSpan) -> PResult<Stmt> {
        self.pos += 1; // export
        if self.eat("default") {
            let decl = match self.peek() {
                Some(t) if t.lexeme == "function" => {
                    let s = t.span;
                    Some(Box::new(Stmt::FunctionDecl(self.parse_function_tail(
                        s,
                        false,
                        FnKind::Declaration,
                    )?)))
                }
                Some(t) if t.lexeme == "async"
                    && self.peek_at(1).is_some_and(|n| n.lexeme == "function") =>
                {
                    let s = t.span;
                    self.pos += 1;
                    Some(Box::new(Stmt::FunctionDecl(self.parse_function_tail(
                        s,
                        true,
                        FnKind::Declaration,
                    )?)))
                }
                Some(t) if t.lexeme == "class" => {
                    let s = t.span;
                    Some(Box::new(Stmt::ClassDecl(self.parse_class(s)?)))
                }
                _ => {
                    let expr = self.parse_assign()?;
                    let span = expr.span();
                    self.expect_semicolon();
                    Some(Box::new(Stmt::Expr { expr, span }))
                }
            };
            return Ok(Stmt::Export { decl, span: self.span_from(start) });
        }
        let decl = match self.peek().map(|t| t.lexeme.as_str()) {
            Some("var" | "let" | "const" | "function" | "class") => {
                Some(Box::new(self.parse_statement()?))
            }
            Some("async") if self.peek_at(1).is_some_and(|t| t.lexeme == "function") => {
                Some(Box::new(self.parse_statement()?))
            }
            _ => {
                self.skip_simple_statement();
                None
            }
        };
        Ok(Stmt::Export { decl, span: self.span_from(start) })
    }

    fn parse_block_stmt(&mut self) -> PResult<Stmt> {
        let start = self.cur_span();
        let body = self.parse_block()?;
        Ok(Stmt::Block { body, span: self.span_from(start) })
    }

    fn parse_block(&mut self) -> PResult<Vec<Stmt>> {
        self.expect("{")?;
        let mut body = Vec::new();
        loop {
            match self.peek() {
                None => {
                    self.error("unclosed block".into());
                    return Err(());
                }
                Some(t) if t.lexeme == "}" => {
                    self.pos += 1;
                    return Ok(body);
                }
                Some(_) => {
                    let before = self.pos;
                    match self.parse_statement() {
                        Ok(stmt) => body.push(stmt),
                        Err(()) => {
                            if self.pos == before {
                                self.pos += 1;
                            }
                            self.synchronize();
                        }
                    }
                }
            }
        }
    }

    fn parse_var_stmt(&mut self, kind: VarKind) -> PResult<Stmt> {
        let start = self.cur_span();
        self.pos += 1;
        let decls = self.parse_declarators()?;
        self.expect_semicolon();
        Ok(Stmt::VarDecl { kind, decls, span: self.span_from(start) })
    }

    fn parse_declarators(&mut self) -> PResult<Vec<Declarator>> {
        let mut decls = Vec::new();
        loop {
            // Base pattern only: `=` at this level is the initializer, not a
            // destructuring default.
            let pat = self.parse_pattern_base()?;
            let mut init = None;
            if self.eat("=") {
                let mut value = self.parse_assign()?;
                if let Pattern::Ident { name, .. } = &pat {
                    infer_name(&mut value, name);
                }
                init = Some(value);
            }
            decls.push(Declarator { pat, init });
            if !self.eat(",") {
                break;
            }
        }
        Ok(decls)
    }

    fn parse_if(&mut self, start: SourceSpan) -> PResult<Stmt> {
        self.pos += 1;
        self.expect("(")?;
        let cond = self.parse_expression()?;
        self.expect(")")?;
        let cons = Box::new(self.parse_statement()?);
        let alt = if self.eat("else") { Some(Box::new(self.parse_statement()?)) } else { None };
        Ok(Stmt::If { cond, cons, alt, span: self.span_from(start) })
    }

    fn parse_while(&mut self, start: SourceSpan) -> PResult<Stmt> {
        self.pos += 1;
        self.expect("(")?;
        let cond = self.parse_expression()?;
        self.expect(")")?;
        let body = Box::new(self.parse_statement()?);
        Ok(Stmt::While { cond, body, span: self.span_from(start) })
    }

    fn parse_do_while(&mut self, start: SourceSpan) -> PResult<Stmt> {
        self.pos += 1;
        let body = Box::new(self.parse_statement()?);
        self.expect("while")?;
        self.expect("(")?;
        let cond = self.parse_expression()?;
        self.expect(")")?;
        self.expect_semicolon();
        Ok(Stmt::DoWhile { body, cond, span: self.span_from(start) })
    }

    /// For-heads are pre-scanned to their closing `)` so the three-section
    /// and `in`/`of` forms can be told apart without backtracking.
    fn parse_for(&mut self, start: SourceSpan) -> PResult<Stmt> {
        self.pos += 1;
        if !self.at("(") {
            self.error("expected `(` after `for`".into());
            return Err(());
        }
        let lparen = self.pos;
        let Some(rparen) = self.matching_bracket(lparen) else {
            self.error("unclosed `for` head".into());
            return Err(());
        };
        self.pos += 1;

        // Locate depth-0 separators within the head.
        let mut semis = Vec::new();
        let mut each: Option<(usize, ForEachKind)> = None;
        let mut depth = 0usize;
        for i in self.pos..rparen {
            let lx = self.toks[i].lexeme.as_str();
            match lx {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => depth = depth.saturating_sub(1),
                ";" if depth == 0 => semis.push(i),
                "in" if depth == 0 && semis.is_empty() && each.is_none() && i > self.pos => {
                    each = Some((i, ForEachKind::In));
                }
                "of" if depth == 0
                    && semis.is_empty()
                    && each.is_none()
                    && i > self.pos
                    && self.toks[i].kind == TokenKind::Identifier =>
                {
                    each = Some((i, ForEachKind::Of));
                }
                _ => {}
            }
        }

        if let Some((sep, kind)) = each.filter(|_| semis.is_empty()) {
            let left = self.parse_foreach_left(sep)?;
            self.pos = sep + 1;
            self.limit_stack.push(rparen);
            let right = self.parse_expression();
            self.limit_stack.pop();
            let right = right?;
            self.pos = rparen + 1;
            let body = Box::new(self.parse_statement()?);
            return Ok(Stmt::ForEach { each: kind, left, right, body, span: self.span_from(start) });
        }

        if semis.len() < 2 {
            self.error("malformed `for` head".into());
            self.pos = rparen + 1;
            let body = Box::new(self.parse_statement()?);
            return Ok(Stmt::For {
                init: None,
                cond: None,
                update: None,
                body,
                span: self.span_from(start),
            });
        }

        let (s1, s2) = (semis[0], semis[1]);
        let init = if self.pos == s1 {
            None
        } else {
            self.limit_stack.push(s1);
            let init = match self.peek().map(|t| t.lexeme.as_str()) {
                Some("var") => {
                    self.pos += 1;
                    self.parse_declarators().map(|d| ForInit::Decl(VarKind::Var, d))
                }
                Some("let") => {
                    self.pos += 1;
                    self.parse_declarators().map(|d| ForInit::Decl(VarKind::Let, d))
                }
                Some("const") => {
                    self.pos += 1;
                    self.parse_declarators().map(|d| ForInit::Decl(VarKind::Const, d))
                }
                _ => self.parse_expression().map(ForInit::Expr),
            };
            self.limit_stack.pop();
            Some(init?)
        };
        self.pos = s1 + 1;
        let cond = if self.pos == s2 {
            None
        } else {
            self.limit_stack.push(s2);
            let cond = self.parse_expression();
            self.limit_stack.pop();
            Some(cond?)
        };
        self.pos = s2 + 1;
        let update = if self.pos == rparen {
            None
        } else {
            self.limit_stack.push(rparen);
            let update = self.parse_expression();
            self.limit_stack.pop();
            Some(update?)
        };
        self.pos = rparen + 1;
        let body = Box::new(self.parse_statement()?);
        Ok(Stmt::For { init, cond, update, body, span: self.span_from(start) })
    }

    fn parse_foreach_left(&mut self, stop: usize) -> PResult<ForLeft> {
        self.limit_stack.push(stop);
        let left = match self.peek().map(|t| t.lexeme.as_str()) {
            Some("var") => {
                self.pos += 1;
                self.parse_pattern().map(|p| ForLeft::Decl(VarKind::Var, p))
            }
            Some("let") => {
                self.pos += 1;
                self.parse_pattern().map(|p| ForLeft::Decl(VarKind::Let, p))
            }
            Some("const") => {
                self.pos += 1;
                self.parse_pattern().map(|p| ForLeft::Decl(VarKind::Const, p))
            }
            _ => self.parse_assign().map(ForLeft::Target),
        };
        self.limit_stack.pop();
        left
    }

    fn parse_switch(&mut self, start: SourceSpan) -> PResult<Stmt> {
        self.pos += 1;
        self.expect("(")?;
        let disc = self.parse_expression()?;
        self.expect(")")?;
        self.expect("{")?;
        let mut cases = Vec::new();
        loop {
            match self.peek() {
                None => {
                    self.error("unclosed switch body".into());
                    return Err(());
                }
                Some(t) if t.lexeme == "}" => {
                    self.pos += 1;
                    break;
                }
                Some(t) if t.lexeme == "case" => {
                    let cstart = t.span;
                    self.pos += 1;
                    let test = self.parse_expression()?;
                    self.expect(":")?;
                    let body = self.parse_case_body();
                    cases.push(SwitchCase {
                        test: Some(test),
                        body,
                        span: self.span_from(cstart),
                    });
                }
                Some(t) if t.lexeme == "default" => {
                    let cstart = t.span;
                    self.pos += 1;
                    self.expect(":")?;
                    let body = self.parse_case_body();
                    cases.push(SwitchCase { test: None, body, span: self.span_from(cstart) });
                }
                Some(_) => {
                    self.error("expected `case` or `default` in switch body".into());
                    self.pos += 1;
                    self.synchronize();
                }
            }
        }
        Ok(Stmt::Switch { disc, cases, span: self.span_from(start) })
    }

    fn parse_case_body(&mut self) -> Vec<Stmt> {
        let mut body = Vec::new();
        while let Some(t) = self.peek() {
            if t.lexeme == "case" || t.lexeme == "default" || t.lexeme == "}" {
                break;
            }
            let before = self.pos;
            match self.parse_statement() {
                Ok(stmt) => body.push(stmt),
                Err(()) => {
                    if self.pos == before {
                        self.pos += 1;
                    }
                    self.synchronize();
                }
            }
        }
        body
    }

    fn parse_try(&mut self, start: SourceSpan) -> PResult<Stmt> {
        self.pos += 1;
        let block = self.parse_block()?;
        let mut catch = None;
        let mut finally = None;
        if self.at("catch") {
            let cstart = self.cur_span();
            self.pos += 1;
            let param = if self.eat("(") {
                let p = self.parse_pattern()?;
                self.expect(")")?;
                Some(p)
            } else {
                None
            };
            let body = self.parse_block()?;
            catch = Some(CatchClause { param, body, span: self.span_from(cstart) });
        }
        if self.eat("finally") {
            finally = Some(self.parse_block()?);
        }
        if catch.is_none() && finally.is_none() {
            self.error("`try` without `catch` or `finally`".into());
        }
        Ok(Stmt::Try { block, catch, finally, span: self.span_from(start) })
    }

    // Patterns --------------------------------------------------------------

    /// Binding pattern with optional default (`x = 1`, `{a, b: c}`, `[x, ...r]`).
    fn parse_pattern(&mut self) -> PResult<Pattern> {
        let base = self.parse_pattern_base()?;
        if self.eat("=") {
            let value = Box::new(self.parse_assign()?);
            let span = base.span().cover(&self.prev_span());
            return Ok(Pattern::Default { inner: Box::new(base), value, span });
        }
        Ok(base)
    }

    fn parse_pattern_base(&mut self) -> PResult<Pattern> {
        let Some(tok) = self.peek() else {
            self.error("expected binding pattern".into());
            return Err(());
        };
        let start = tok.span;
        match tok.lexeme.as_str() {
            "{" => {
                self.pos += 1;
                let mut props = Vec::new();
                while !self.at("}") {
                    if self.peek().is_none() {
                        self.error("unclosed object pattern".into());
                        return Err(());
                    }
                    if self.eat("...") {
                        let inner = self.parse_pattern_base()?;
                        let span = inner.span();
                        props.push(("...".to_string(), Pattern::Rest {
                            inner: Box::new(inner),
                            span,
                        }));
                    } else {
                        let key = self.parse_property_key_text()?;
                        let sub = if self.eat(":") {
                            self.parse_pattern()?
                        } else if self.at("=") {
                            // Shorthand with default.
                            let ident =
                                Pattern::Ident { name: key.clone(), span: self.prev_span() };
                            self.pos += 1;
                            let value = Box::new(self.parse_assign()?);
                            let span = ident.span().cover(&self.prev_span());
                            Pattern::Default { inner: Box::new(ident), value, span }
                        } else {
                            Pattern::Ident { name: key.clone(), span: self.prev_span() }
                        };
                        props.push((key, sub));
                    }
                    if !self.eat(",") {
                        break;
                    }
                }
                self.expect("}")?;
                Ok(Pattern::Object { props, span: self.span_from(start) })
            }
            "[" => {
                self.pos += 1;
                let mut elems = Vec::new();
                while !self.at("]") {
                    if self.peek().is_none() {
                        self.error("unclosed array pattern".into());
                        return Err(());
                    }
                    if self.at(",") {
                        elems.push(None);
                        self.pos += 1;
                        continue;
                    }
                    if self.eat("...") {
                        let inner = self.parse_pattern()?;
                        let span = inner.span();
                        elems.push(Some(Pattern::Rest { inner: Box::new(inner), span }));
                    } else {
                        elems.push(Some(self.parse_pattern()?));
                    }
                    if !self.eat(",") {
                        break;
                    }
                }
                self.expect("]")?;
                Ok(Pattern::Array { elems, span: self.span_from(start) })
            }
            "..." => {
                self.pos += 1;
                let inner = self.parse_pattern()?;
                Ok(Pattern::Rest { inner: Box::new(inner), span: self.span_from(start) })
            }
            _ if tok.kind == TokenKind::Identifier || tok.lexeme == "this" => {
                self.pos += 1;
                // A `:` after a plain parameter name is a strong TypeScript
                // signal (type annotation); flag it rather than mis-parse.
                if self.at(":") {
                    self.unsupported("type annotations are not supported (TypeScript?)");
                    return Err(());
                }
                Ok(Pattern::Ident { name: tok.lexeme.clone(), span: start })
            }
            _ => {
                self.error(format!("expected binding pattern, found `{}`", tok.lexeme));
                Err(())
            }
        }
    }

    /// Property key as display text; computed keys yield `None`-ish markers.
    fn parse_property_key_text(&mut self) -> PResult<String> {
        let Some(tok) = self.peek() else {
            self.error("expected property key".into());
            return Err(());
        };
        match tok.kind {
            TokenKind::Identifier | TokenKind::Keyword => {
                self.pos += 1;
                Ok(tok.lexeme.clone())
            }
            TokenKind::Literal => {
                self.pos += 1;
                Ok(tok.lexeme.clone())
            }
            TokenKind::Punctuation if tok.lexeme == "[" => {
                let open = self.pos;
                match self.matching_bracket(open) {
                    Some(close) => {
                        self.pos = close + 1;
                        Ok("<computed>".to_string())
                    }
                    None => {
                        self.error("unclosed computed key".into());
                        Err(())
                    }
                }
            }
            _ => {
                self.error(format!("expected property key, found `{}`", tok.lexeme));
                Err(())
            }
        }
    }

    // Functions and classes -------------------------------------------------

    /// Parses from the `function` keyword onward. `start` covers any already
    /// consumed modifier (`async`).
    fn parse_function_tail(
        &mut self,
        start: SourceSpan,
        is_async: bool,
        kind: FnKind,
    ) -> PResult<FunctionDef> {
        self.expect("function")?;
        let is_generator = self.eat("*");
        let name = match self.peek() {
            Some(t) if t.kind == TokenKind::Identifier => {
                self.pos += 1;
                Some(t.lexeme.clone())
            }
            _ => None,
        };
        let params = self.parse_params()?;
        let body = FnBody::Block(self.parse_block()?);
        Ok(FunctionDef {
            name,
            inferred_name: None,
            kind,
            is_async,
            is_generator,
            params,
            body,
            span: self.span_from(start),
        })
    }

    fn parse_params(&mut self) -> PResult<Vec<Pattern>> {
        self.expect("(")?;
        let mut params = Vec::new();
        while !self.at(")") {
            if self.peek().is_none() {
                self.error("unclosed parameter list".into());
                return Err(());
            }
            params.push(self.parse_pattern()?);
            if !self.eat(",") {
                break;
            }
        }
        self.expect(")")?;
        Ok(params)
    }

    /// Method-shaped tail: parameter list plus block body.
    fn parse_method_tail(
        &mut self,
        start: SourceSpan,
        name: Option<String>,
        kind: FnKind,
        is_async: bool,
        is_generator: bool,
    ) -> PResult<FunctionDef> {
        let params = self.parse_params()?;
        let body = FnBody::Block(self.parse_block()?);
        Ok(FunctionDef {
            name,
            inferred_name: None,
            kind,
            is_async,
            is_generator,
            params,
            body,
            span: self.span_from(start),
        })
    }

    fn parse_class(&mut self, start: SourceSpan) -> PResult<ClassDef> {
        self.expect("class")?;
        let name = match self.peek() {
            Some(t) if t.kind == TokenKind::Identifier => {
                self.pos += 1;
                Some(t.lexeme.clone())
            }
            _ => None,
        };
        let superclass = if self.eat("extends") {
            Some(Box::new(self.parse_unary_via_call()?))
        } else {
            None
        };
        self.expect("{")?;
        let mut members = Vec::new();
        loop {
            match self.peek() {
                None => {
                    self.error("unclosed class body".into());
                    return Err(());
                }
                Some(t) if t.lexeme == "}" => {
                    self.pos += 1;
                    break;
                }
                Some(t) if t.lexeme == ";" => {
                    self.pos += 1;
                }
                Some(_) => {
                    let before = self.pos;
                    match self.parse_class_member() {
                        Ok(m) => members.push(m),
                        Err(()) => {
                            if self.pos == before {
                                self.pos += 1;
                            }
                            self.synchronize();
                        }
                    }
                }
            }
        }
        Ok(ClassDef { name, inferred_name: None, superclass, members, span: self.span_from(start) })
    }

    fn parse_class_member(&mut self) -> PResult<ClassMember> {
        let start = self.cur_span();
        let mut is_static = false;
        if self.at("static")
            && self
                .peek_at(1)
                .is_some_and(|t| !matches!(t.lexeme.as_str(), "(" | "=" | ";" | "}"))
        {
            is_static = true;
            self.pos += 1;
        }
        let mut is_async = false;
        if self.at("async")
            && self.peek_at(1).is_some_and(|t| {
                !matches!(t.lexeme.as_str(), "(" | "=" | ";" | "}") && !t.newline_before
            })
        {
            is_async = true;
            self.pos += 1;
        }
        let is_generator = self.eat("*");
        let mut accessor: Option<FnKind> = None;
        if (self.at("get") || self.at("set"))
            && self.peek_at(1).is_some_and(|t| !matches!(t.lexeme.as_str(), "(" | "=" | ";" | "}"))
        {
            accessor = Some(if self.at("get") { FnKind::Getter } else { FnKind::Setter });
            self.pos += 1;
        }
        let key_tok = self.peek();
        let key = match key_tok {
            Some(t)
                if matches!(t.kind, TokenKind::Identifier | TokenKind::Keyword)
                    || t.kind == TokenKind::Literal =>
            {
                self.pos += 1;
                Some(t.lexeme.clone())
            }
            Some(t) if t.lexeme == "[" => {
                let close = self.matching_bracket(self.pos).ok_or_else(|| {
                    self.error("unclosed computed member key".into());
                })?;
                self.pos = close + 1;
                None
            }
            _ => {
                self.error("expected class member".into());
                return Err(());
            }
        };
        if self.at("(") {
            let kind = match accessor {
                Some(k) => k,
                None if key.as_deref() == Some("constructor") && !is_static => FnKind::Constructor,
                None => FnKind::Method,
            };
            let func =
                self.parse_method_tail(start, key.clone(), kind, is_async, is_generator)?;
            return Ok(ClassMember {
                is_static,
                key,
                func: Some(func),
                value: None,
                span: self.span_from(start),
            });
        }
        // Field: optional initializer.
        let mut value = None;
        if self.eat("=") {
            let mut v = self.parse_assign()?;
            if let Some(k) = &key {
                infer_name(&mut v, k);
            }
            value = Some(v);
        }
        self.expect_semicolon();
        Ok(ClassMember { is_static, key, func: None, value, span: self.span_from(start) })
    }

    // Expressions ------------------------------------------------------------

    fn parse_expression(&mut self) -> PResult<Expr> {
        let start = self.cur_span();
        let first = self.parse_assign()?;
        if !self.at(",") {
            return Ok(first);
        }
        let mut exprs = alloc::vec![first];
        while self.eat(",") {
            exprs.push(self.parse_assign()?);
        }
        Ok(Expr::Seq { exprs, span: self.span_from(start) })
    }

    fn parse_assign(&mut self) -> PResult<Expr> {
        if self.at("yield") {
            return self.parse_yield();
        }
        if let Some(arrow) = self.try_parse_arrow()? {
            return Ok(arrow);
        }
        let start = self.cur_span();
        let lhs = self.parse_cond()?;
        const ASSIGN_OPS: &[&str] = &[
            "=", "+=", "-=", "*=", "/=", "%=", "<<=", ">>=", ">>>=", "&=", "|=", "^=", "**=",
        ];
        if let Some(op) = self.peek().map(|t| t.lexeme.clone()) {
            if ASSIGN_OPS.contains(&op.as_str()) {
                self.pos += 1;
                let mut value = self.parse_assign()?;
                match &lhs {
                    Expr::Ident { name, .. } => infer_name(&mut value, name),
                    Expr::Member { prop: MemberProp::Static(p), .. } => infer_name(&mut value, p),
                    _ => {}
                }
                return Ok(Expr::Assign {
                    op,
                    target: Box::new(lhs),
                    value: Box::new(value),
                    span: self.span_from(start),
                });
            }
        }
        Ok(lhs)
    }

    fn parse_yield(&mut self) -> PResult<Expr> {
        let start = self.cur_span();
        self.pos += 1;
        let delegate = self.eat("*");
        let arg = match self.peek() {
            Some(t)
                if !t.newline_before
                    && !matches!(t.lexeme.as_str(), ")" | "]" | "}" | "," | ";" | ":") =>
            {
                Some(Box::new(self.parse_assign()?))
            }
            _ => None,
        };
        Ok(Expr::Yield { arg, delegate, span: self.span_from(start) })
    }

    /// Detects and parses arrow functions at assignment-expression position.
    fn try_parse_arrow(&mut self) -> PResult<Option<Expr>> {
        let Some(tok) = self.peek() else {
            return Ok(None);
        };
        let start = tok.span;

        // async variants first: `async (…) =>` and `async x =>`.
        if tok.kind == TokenKind::Identifier && tok.lexeme == "async" {
            if let Some(next) = self.peek_at(1) {
                if !next.newline_before {
                    if next.kind == TokenKind::Identifier
                        && self.peek_at(2).is_some_and(|t| t.lexeme == "=>")
                    {
                        self.pos += 1;
                        return self.parse_arrow_tail(start, true).map(Some);
                    }
                    if next.lexeme == "(" {
                        if let Some(close) = self.matching_bracket(self.pos + 1) {
                            if close + 1 < self.limit() && self.toks[close + 1].lexeme == "=>" {
                                self.pos += 1;
                                return self.parse_arrow_tail(start, true).map(Some);
                            }
                        }
                    }
                }
            }
            return Ok(None);
        }

        if tok.kind == TokenKind::Identifier
            && self.peek_at(1).is_some_and(|t| t.lexeme == "=>")
        {
            return self.parse_arrow_tail(start, false).map(Some);
        }
        if tok.lexeme == "(" {
            if let Some(close) = self.matching_bracket(self.pos) {
                if close + 1 < self.limit() && self.toks[close + 1].lexeme == "=>" {
                    return self.parse_arrow_tail(start, false).map(Some);
                }
            }
        }
        Ok(None)
    }

    /// Positioned at the parameter list (single identifier or `( … )`).
    fn parse_arrow_tail(&mut self, start: SourceSpan, is_async: bool) -> PResult<Expr> {
        let params = if self.at("(") {
            self.parse_params()?
        } else {
            let tok = self.bump().expect("checked identifier");
            alloc::vec![Pattern::Ident { name: tok.lexeme.clone(), span: tok.span }]
        };
        self.expect("=>")?;
        let body = if self.at("{") {
            FnBody::Block(self.parse_block()?)
        } else {
            FnBody::Expr(Box::new(self.parse_assign()?))
        };
        Ok(Expr::Function(Box::new(FunctionDef {
            name: None,
            inferred_name: None,
            kind: FnKind::Arrow,
            is_async,
            is_generator: false,
            params,
            body,
            span: self.span_from(start),
        })))
    }

    fn parse_cond(&mut self) -> PResult<Expr> {
        let start = self.cur_span();
        let test = self.parse_binary(0)?;
        if self.eat("?") {
            let cons = Box::new(self.parse_assign()?);
            self.expect(":")?;
            let alt = Box::new(self.parse_assign()?);
            return Ok(Expr::Cond {
                test: Box::new(test),
                cons,
                alt,
                span: self.span_from(start),
            });
        }
        Ok(test)
    }

    fn binary_level(&self, lexeme: &str) -> Option<u8> {
        let level = match lexeme {
            "??" => 1,
            "||" => 2,
            "&&" => 3,
            "|" => 4,
            "^" => 5,
            "&" => 6,
            "==" | "!=" | "===" | "!==" => 7,
            "<" | ">" | "<=" | ">=" | "in" | "instanceof" => 8,
            "<<" | ">>" | ">>>" => 9,
            "+" | "-" => 10,
            "*" | "/" | "%" => 11,
            "**" => 12,
            _ => return None,
        };
        Some(level)
    }

    fn parse_binary(&mut self, min_level: u8) -> PResult<Expr> {
        let start = self.cur_span();
        let mut left = self.parse_unary()?;
        while let Some(tok) = self.peek() {
            let Some(level) = self.binary_level(&tok.lexeme) else {
                break;
            };
            if level < min_level {
                break;
            }
            let op = tok.lexeme.clone();
            self.pos += 1;
            // `**` is right-associative; everything else is left.
            let right = if op == "**" {
                self.parse_binary(level)?
            } else {
                self.parse_binary(level + 1)?
            };
            left = Expr::Binary {
                op,
                left: Box::new(left),
                right: Box::new(right),
                span: self.span_from(start),
            };
        }
        Ok(left)
    }

    fn parse_unary(&mut self) -> PResult<Expr> {
        let Some(tok) = self.peek() else {
            self.error("expected expression".into());
            return Err(());
        };
        let start = tok.span;
        match (tok.kind, tok.lexeme.as_str()) {
            (TokenKind::Operator, "!" | "~" | "+" | "-") => {
                let op = tok.lexeme.clone();
                self.pos += 1;
                let arg = Box::new(self.parse_unary()?);
                Ok(Expr::Unary { op, arg, span: self.span_from(start) })
            }
            (TokenKind::Operator, "++" | "--") => {
                let op = tok.lexeme.clone();
                self.pos += 1;
                let arg = Box::new(self.parse_unary()?);
                Ok(Expr::Update { op, prefix: true, arg, span: self.span_from(start) })
            }
            (TokenKind::Keyword, "typeof" | "void" | "delete") => {
                let op = tok.lexeme.clone();
                self.pos += 1;
                let arg = Box::new(self.parse_unary()?);
                Ok(Expr::Unary { op, arg, span: self.span_from(start) })
            }
            (TokenKind::Keyword, "await") => {
                self.pos += 1;
                let arg = Box::new(self.parse_unary()?);
                Ok(Expr::Await { arg, span: self.span_from(start) })
            }
            _ => self.parse_postfix(),
        }
    }

    fn parse_postfix(&mut self) -> PResult<Expr> {
        let start = self.cur_span();
        let expr = self.parse_call_member(true)?;
        if let Some(tok) = self.peek() {
            if matches!(tok.lexeme.as_str(), "++" | "--") && !tok.newline_before {
                let op = tok.lexeme.clone();
                self.pos += 1;
                return Ok(Expr::Update {
                    op,
                    prefix: false,
                    arg: Box::new(expr),
                    span: self.span_from(start),
                });
            }
        }
        Ok(expr)
    }

    /// `extends` clauses take a LeftHandSideExpression; reuse the call/member
    /// machinery for that single case.
    fn parse_unary_via_call(&mut self) -> PResult<Expr> {
        self.parse_call_member(true)
    }

    fn parse_call_member(&mut self, allow_call: bool) -> PResult<Expr> {
        let start = self.cur_span();
        let mut expr = if self.at("new")
            && !self.peek_at(1).is_some_and(|t| t.lexeme == ".")
        {
            self.pos += 1;
            let callee = Box::new(self.parse_call_member(false)?);
            let args = if self.at("(") { self.parse_args()? } else { Vec::new() };
            Expr::New { callee, args, span: self.span_from(start) }
        } else {
            self.parse_primary()?
        };

        loop {
            let Some(tok) = self.peek() else { break };
            match tok.lexeme.as_str() {
                "." | "?." => {
                    self.pos += 1;
                    match self.peek() {
                        Some(t)
                            if matches!(
                                t.kind,
                                TokenKind::Identifier | TokenKind::Keyword
                            ) =>
                        {
                            self.pos += 1;
                            expr = Expr::Member {
                                obj: Box::new(expr),
                                prop: MemberProp::Static(t.lexeme.clone()),
                                span: self.span_from(start),
                            };
                        }
                        Some(t) if t.lexeme == "(" && allow_call => {
                            // `?.(…)` optional call.
                            let args = self.parse_args()?;
                            expr = Expr::Call {
                                callee: Box::new(expr),
                                args,
                                span: self.span_from(start),
                            };
                        }
                        Some(t) if t.lexeme == "[" => {
                            // `?.[…]` optional computed member.
                            self.pos += 1;
                            let prop = self.parse_expression()?;
                            self.expect("]")?;
                            expr = Expr::Member {
                                obj: Box::new(expr),
                                prop: MemberProp::Computed(Box::new(prop)),
                                span: self.span_from(start),
                            };
                        }
                        _ => {
                            self.error("expected property name after `.`".into());
                            return Err(());
                        }
                    }
                }
                "[" => {
                    self.pos += 1;
                    let prop = self.parse_expression()?;
                    self.expect("]")?;
                    expr = Expr::Member {
                        obj: Box::new(expr),
                        prop: MemberProp::Computed(Box::new(prop)),
                        span: self.span_from(start),
                    };
                }
                "(" if allow_call => {
                    let args = self.parse_args()?;
                    expr =
                        Expr::Call { callee: Box::new(expr), args, span: self.span_from(start) };
                }
                _ if tok.kind == TokenKind::Literal
                    && matches!(
                        tok.detail,
                        TokenDetail::TemplateHead | TokenDetail::TemplateFull
                    ) =>
                {
                    let quasi = Box::new(self.parse_template()?);
                    expr = Expr::TaggedTemplate {
                        tag: Box::new(expr),
                        quasi,
                        span: self.span_from(start),
                    };
                }
                _ => break,
            }
        }
        Ok(expr)
    }

    fn parse_args(&mut self) -> PResult<Vec<Expr>> {
        self.expect("(")?;
        let mut args = Vec::new();
        while !self.at(")") {
            if self.peek().is_none() {
                self.error("unclosed argument list".into());
                return Err(());
            }
            if self.at("...") {
                let start = self.cur_span();
                self.pos += 1;
                let arg = Box::new(self.parse_assign()?);
                args.push(Expr::Spread { arg, span: self.span_from(start) });
            } else {
                args.push(self.parse_assign()?);
            }
            if !self.eat(",") {
                break;
            }
        }
        self.expect(")")?;
        Ok(args)
    }

    fn parse_template(&mut self) -> PResult<Expr> {
        let start = self.cur_span();
        let head = self.bump().expect("template token");
        if head.detail == TokenDetail::TemplateFull {
            return Ok(Expr::Template { exprs: Vec::new(), span: self.span_from(start) });
        }
        let mut exprs = Vec::new();
        loop {
            exprs.push(self.parse_expression()?);
            match self.peek() {
                Some(t) if t.detail == TokenDetail::TemplateMiddle => {
                    self.pos += 1;
                }
                Some(t) if t.detail == TokenDetail::TemplateTail => {
                    self.pos += 1;
                    break;
                }
                _ => {
                    self.error("unterminated template expression".into());
                    return Err(());
                }
            }
        }
        Ok(Expr::Template { exprs, span: self.span_from(start) })
    }

    fn parse_primary(&mut self) -> PResult<Expr> {
        let Some(tok) = self.peek() else {
            self.error("expected expression".into());
            return Err(());
        };
        let start = tok.span;
        match tok.kind {
            TokenKind::Identifier => {
                // `async function` expression at primary position.
                if tok.lexeme == "async"
                    && self
                        .peek_at(1)
                        .is_some_and(|t| t.lexeme == "function" && !t.newline_before)
                {
                    self.pos += 1;
                    let def = self.parse_function_tail(start, true, FnKind::Expression)?;
                    return Ok(Expr::Function(Box::new(def)));
                }
                self.pos += 1;
                Ok(Expr::Ident { name: tok.lexeme.clone(), span: start })
            }
            TokenKind::Keyword => match tok.lexeme.as_str() {
                "this" => {
                    self.pos += 1;
                    Ok(Expr::This { span: start })
                }
                "super" => {
                    self.pos += 1;
                    Ok(Expr::SuperRef { span: start })
                }
                "true" | "false" | "null" => {
                    self.pos += 1;
                    Ok(Expr::Literal { raw: tok.lexeme.clone(), span: start })
                }
                "function" => {
                    let def = self.parse_function_tail(start, false, FnKind::Expression)?;
                    Ok(Expr::Function(Box::new(def)))
                }
                "class" => {
                    let def = self.parse_class(start)?;
                    Ok(Expr::Class(Box::new(def)))
                }
                "import" => {
                    // Dynamic import: parsed as a call to the pseudo-callee.
                    self.pos += 1;
                    Ok(Expr::Ident { name: "import".to_string(), span: start })
                }
                "new" => {
                    // Only reachable as `new.target`; plain `new` expressions
                    // are consumed by `parse_call_member`.
                    self.pos += 1;
                    if self.eat(".") && self.peek().is_some() {
                        self.pos += 1;
                        Ok(Expr::Ident { name: "new.target".to_string(), span: self.span_from(start) })
                    } else {
                        self.error("expected `.target` after `new`".into());
                        Err(())
                    }
                }
                other => {
                    self.error(format!("unexpected keyword `{other}`"));
                    Err(())
                }
            },
            TokenKind::Literal => match tok.detail {
                TokenDetail::TemplateHead | TokenDetail::TemplateFull => self.parse_template(),
                TokenDetail::TemplateMiddle | TokenDetail::TemplateTail => {
                    self.error("unexpected template fragment".into());
                    Err(())
                }
                _ => {
                    self.pos += 1;
                    Ok(Expr::Literal { raw: tok.lexeme.clone(), span: start })
                }
            },
            TokenKind::Punctuation => match tok.lexeme.as_str() {
                "(" => {
                    self.pos += 1;
                    let inner = self.parse_expression()?;
                    self.expect(")")?;
                    Ok(inner)
                }
                "[" => {
                    self.pos += 1;
                    let mut elems = Vec::new();
                    while !self.at("]") {
                        if self.peek().is_none() {
                            self.error("unclosed array literal".into());
                            return Err(());
                        }
                        if self.at(",") {
                            elems.push(None);
                            self.pos += 1;
                            continue;
                        }
                        if self.at("...") {
                            let sstart = self.cur_span();
                            self.pos += 1;
                            let arg = Box::new(self.parse_assign()?);
                            elems.push(Some(Expr::Spread { arg, span: self.span_from(sstart) }));
                        } else {
                            elems.push(Some(self.parse_assign()?));
                        }
                        if !self.eat(",") {
                            break;
                        }
                    }
                    self.expect("]")?;
                    Ok(Expr::Array { elems, span: self.span_from(start) })
                }
                "{" => self.parse_object_literal(),
                other => {
                    self.error(format!("unexpected token `{other}`"));
                    Err(())
                }
            },
            TokenKind::Operator => match tok.lexeme.as_str() {
                "<" => {
                    self.unsupported("JSX-like syntax is not supported");
                    Err(())
                }
                other => {
                    self.error(format!("unexpected operator `{other}`"));
                    Err(())
                }
            },
            TokenKind::Comment => unreachable!("comments are filtered before parsing"),
        }
    }

    fn parse_object_literal(&mut self) -> PResult<Expr> {
        let start = self.cur_span();
        self.expect("{")?;
        let mut props = Vec::new();
        while !self.at("}") {
            if self.peek().is_none() {
                self.error("unclosed object literal".into());
                return Err(());
            }
            props.push(self.parse_object_prop()?);
            if !self.eat(",") {
                break;
            }
        }
        self.expect("}")?;
        Ok(Expr::Object { props, span: self.span_from(start) })
    }

    fn parse_object_prop(&mut self) -> PResult<ObjectProp> {
        let start = self.cur_span();
        if self.at("...") {
            self.pos += 1;
            let arg = self.parse_assign()?;
            return Ok(ObjectProp::Spread { arg, span: self.span_from(start) });
        }

        // Accessor and modifier prefixes, each only when a key follows.
        let mut is_async = false;
        if self.at("async")
            && self.peek_at(1).is_some_and(|t| {
                !matches!(t.lexeme.as_str(), ":" | "," | "(" | "}" | "=") && !t.newline_before
            })
        {
            is_async = true;
            self.pos += 1;
        }
        let is_generator = self.eat("*");
        if !is_async && !is_generator && (self.at("get") || self.at("set")) {
            let follows_key = self
                .peek_at(1)
                .is_some_and(|t| !matches!(t.lexeme.as_str(), ":" | "," | "(" | "}"));
            if follows_key {
                let kind = if self.at("get") { FnKind::Getter } else { FnKind::Setter };
                self.pos += 1;
                let (key, _) = self.parse_prop_name()?;
                let name = key.display().map(|s| s.to_string());
                let def = self.parse_method_tail(start, name, kind, false, false)?;
                return Ok(ObjectProp::Method(def));
            }
        }

        let (key, _key_span) = self.parse_prop_name()?;
        match self.peek().map(|t| t.lexeme.as_str()) {
            Some("(") => {
                let name = key.display().map(|s| s.to_string());
                let def =
                    self.parse_method_tail(start, name, FnKind::Method, is_async, is_generator)?;
                Ok(ObjectProp::Method(def))
            }
            Some(":") => {
                self.pos += 1;
                let mut value = self.parse_assign()?;
                if let Some(name) = key.display() {
                    infer_name(&mut value, name);
                }
                Ok(ObjectProp::KeyValue { key, value, span: self.span_from(start) })
            }
            Some("=") => {
                // Only meaningful inside destructuring; tolerated here.
                self.pos += 1;
                let _ = self.parse_assign()?;
                let name = key.display().unwrap_or("<computed>").to_string();
                Ok(ObjectProp::Shorthand { name, span: self.span_from(start) })
            }
            _ => {
                let name = key.display().unwrap_or("<computed>").to_string();
                Ok(ObjectProp::Shorthand { name, span: self.span_from(start) })
            }
        }
    }

    fn parse_prop_name(&mut self) -> PResult<(PropName, SourceSpan)> {
        let Some(tok) = self.peek() else {
            self.error("expected property name".into());
            return Err(());
        };
        let span = tok.span;
        match tok.kind {
            TokenKind::Identifier | TokenKind::Keyword => {
                self.pos += 1;
                Ok((PropName::Ident(tok.lexeme.clone()), span))
            }
            TokenKind::Literal
                if matches!(tok.detail, TokenDetail::Number | TokenDetail::String) =>
            {
                self.pos += 1;
                Ok((PropName::Literal(tok.lexeme.clone()), span))
            }
            TokenKind::Punctuation if tok.lexeme == "[" => {
                self.pos += 1;
                let _ = self.parse_assign()?;
                self.expect("]")?;
                Ok((PropName::Computed, span))
            }
            _ => {
                self.error(format!("expected property name, found `{}`", tok.lexeme));
                Err(())
            }
        }
    }
}

/// Attaches a context-derived name to an anonymous function or class value.
fn infer_name(value: &mut Expr, name: &str) {
    match value {
        Expr::Function(def) if def.name.is_none() && def.inferred_name.is_none() => {
            def.inferred_name = Some(name.to_string());
        }
        Expr::Class(def) if def.name.is_none() && def.inferred_name.is_none() => {
            def.inferred_name = Some(name.to_string());
        }
        _ => {}
    }
}
