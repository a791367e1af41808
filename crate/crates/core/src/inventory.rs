//! Function discovery: walks a parsed program and produces one record per
//! function-like construct (declarations, expressions, arrows, methods,
//! getters/setters, constructors) with deterministic qualified names.
//!
//! Qualified names are the dotted chain of enclosing function and class
//! scopes. Anonymous functions get `<anon@line:col>`, computed-key methods
//! `<computed@line:col>`, and getter/setter segments are prefixed `get `/
//! `set ` so a getter/setter pair stays distinguishable. A `#N` suffix
//! disambiguates the rare duplicate qualified name within one file.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::HashMap;
use serde::{Deserialize, Serialize};

use crate::lex::{tokenize, Diagnostic};
use crate::parse::{
    self, CatchClause, ClassDef, ClassMember, Declarator, Expr, FnBody, FnKind, ForInit, ForLeft,
    FunctionDef, ObjectProp, Pattern, Program, Stmt, SwitchCase,
};
use crate::span::FunctionKey;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionRecord {
    pub key: FunctionKey,
    /// Leaf display name (last qualified-name segment before deduplication).
    pub name: String,
    /// Index of the innermost enclosing function record, if any.
    pub parent: Option<usize>,
    /// Declared formal parameters (destructuring patterns and rest count 1).
    pub param_count: u32,
    pub kind: FunctionKind,
}

/// Mirror of [`FnKind`] that lives in serialized artifacts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionKind {
    Declaration,
    Expression,
    Arrow,
    Method,
    Getter,
    Setter,
    Constructor,
}

impl From<FnKind> for FunctionKind {
    fn from(value: FnKind) -> Self {
        match value {
            FnKind::Declaration => FunctionKind::Declaration,
            FnKind::Expression => FunctionKind::Expression,
            FnKind::Arrow => FunctionKind::Arrow,
            FnKind::Method => FunctionKind::Method,
            FnKind::Getter => FunctionKind::Getter,
            FnKind::Setter => FunctionKind::Setter,
            FnKind::Constructor => FunctionKind::Constructor,
        }
    }
}

/// Inventory of one parsed program. `defs` parallels `records`, giving the
/// metrics layer AST access without re-walking scope structure.
pub struct Inventory<'a> {
    pub records: Vec<FunctionRecord>,
    pub defs: Vec<&'a FunctionDef>,
}

/// Result of the text-level convenience entry point.
#[derive(Debug, Clone)]
pub struct ExtractedFunctions {
    pub keys: Vec<FunctionKey>,
    pub diagnostics: Vec<Diagnostic>,
    /// True when lexing or parsing recovered from errors; downstream may
    /// exclude such files via configuration.
    pub partial: bool,
}

/// Lexes, parses, and inventories `source` in one step. The file path of the
/// returned keys is empty; callers with real paths should parse themselves
/// and use [`inventory_program`].
pub fn extract_functions(source: &str) -> ExtractedFunctions {
    let stream = tokenize(source);
    let parsed = parse::parse(&stream);
    let inventory = inventory_program("", &parsed.program);
    let mut diagnostics = stream.diagnostics.clone();
    diagnostics.extend(parsed.diagnostics);
    ExtractedFunctions {
        keys: inventory.records.into_iter().map(|r| r.key).collect(),
        partial: !diagnostics.is_empty(),
        diagnostics,
    }
}

/// Walks `program` in source order and returns every function with its
/// qualified name. Records appear in span-start order (pre-order traversal of
/// physically nested constructs).
pub fn inventory_program<'a>(file_path: &str, program: &'a Program) -> Inventory<'a> {
    let mut walker = Walker {
        file_path,
        segments: Vec::new(),
        parent_stack: Vec::new(),
        records: Vec::new(),
        defs: Vec::new(),
        seen: HashMap::new(),
    };
    walker.walk_stmts(&program.body);
    Inventory { records: walker.records, defs: walker.defs }
}

struct Walker<'a, 'p> {
    file_path: &'p str,
    /// Enclosing scope names, including class segments.
    segments: Vec<String>,
    /// Enclosing function record indices (classes excluded).
    parent_stack: Vec<usize>,
    records: Vec<FunctionRecord>,
    defs: Vec<&'a FunctionDef>,
    seen: HashMap<String, u32>,
}

impl<'a, 'p> Walker<'a, 'p> {
    fn visit_function(&mut self, def: &'a FunctionDef) {
        let segment = self.segment_name(def);
        let mut qualified = if self.segments.is_empty() {
            segment.clone()
        } else {
            format!("{}.{}", self.segments.join("."), segment)
        };
        let count = self.seen.entry(qualified.clone()).or_insert(0);
        *count += 1;
        if *count > 1 {
            qualified = format!("{}#{}", qualified, *count);
        }

        let index = self.records.len();
        self.records.push(FunctionRecord {
            key: FunctionKey::new(self.file_path, &qualified, def.span),
            name: segment.clone(),
            parent: self.parent_stack.last().copied(),
            param_count: def.params.len() as u32,
            kind: def.kind.into(),
        });
        self.defs.push(def);

        self.segments.push(segment);
        self.parent_stack.push(index);
        for param in &def.params {
            self.walk_pattern(param);
        }
        match &def.body {
            FnBody::Block(stmts) => self.walk_stmts(stmts),
            FnBody::Expr(expr) => self.walk_expr(expr),
        }
        self.parent_stack.pop();
        self.segments.pop();
    }

    fn segment_name(&self, def: &FunctionDef) -> String {
        let base = def.name.clone().or_else(|| def.inferred_name.clone());
        let method_like = matches!(
            def.kind,
            FnKind::Method | FnKind::Getter | FnKind::Setter | FnKind::Constructor
        );
        let fallback = || {
            let marker = if method_like { "computed" } else { "anon" };
            format!("<{}@{}:{}>", marker, def.span.start_line, def.span.start_col)
        };
        let name = base.unwrap_or_else(fallback);
        match def.kind {
            FnKind::Getter => format!("get {name}"),
            FnKind::Setter => format!("set {name}"),
            _ => name,
        }
    }

    fn visit_class(&mut self, def: &'a ClassDef) {
        // The superclass expression evaluates outside the class scope.
        if let Some(superclass) = &def.superclass {
            self.walk_expr(superclass);
        }
        let segment = def
            .name
            .clone()
            .or_else(|| def.inferred_name.clone())
            .unwrap_or_else(|| format!("<anon@{}:{}>", def.span.start_line, def.span.start_col));
        self.segments.push(segment);
        for member in &def.members {
            self.visit_class_member(member);
        }
        self.segments.pop();
    }

    fn visit_class_member(&mut self, member: &'a ClassMember) {
        if let Some(func) = &member.func {
            self.visit_function(func);
        }
        if let Some(value) = &member.value {
            self.walk_expr(value);
        }
    }

    fn walk_stmts(&mut self, stmts: &'a [Stmt]) {
        for stmt in stmts {
            self.walk_stmt(stmt);
        }
    }

    fn walk_stmt(&mut self, stmt: &'a Stmt) {
        match stmt {
            Stmt::Expr { expr, .. } => self.walk_expr(expr),
            Stmt::VarDecl { decls, .. } => {
                for Declarator { pat, init } in decls {
                    self.walk_pattern(pat);
                    if let Some(init) = init {
                        self.walk_expr(init);
                    }
                }
            }
            Stmt::FunctionDecl(def) => self.visit_function(def),
            Stmt::ClassDecl(def) => self.visit_class(def),
            Stmt::Return { arg, .. } => {
                if let Some(arg) = arg {
                    self.walk_expr(arg);
                }
            }
            Stmt::If { cond, cons, alt, .. } => {
                self.walk_expr(cond);
                self.walk_stmt(cons);
                if let Some(alt) = alt {
                    self.walk_stmt(alt);
                }
            }
            Stmt::For { init, cond, update, body, .. } => {
                match init {
                    Some(ForInit::Decl(_, decls)) => {
                        for Declarator { pat, init } in decls {
                            self.walk_pattern(pat);
                            if let Some(init) = init {
                                self.walk_expr(init);
                            }
                        }
                    }
                    Some(ForInit::Expr(expr)) => self.walk_expr(expr),
                    None => {}
                }
                if let Some(cond) = cond {
                    self.walk_expr(cond);
                }
                if let Some(update) = update {
                    self.walk_expr(update);
                }
                self.walk_stmt(body);
            }
            Stmt::ForEach { left, right, body, .. } => {
                match left {
                    ForLeft::Decl(_, pat) => self.walk_pattern(pat),
                    ForLeft::Target(expr) => self.walk_expr(expr),
                }
                self.walk_expr(right);
                self.walk_stmt(body);
            }
            Stmt::While { cond, body, .. } => {
                self.walk_expr(cond);
                self.walk_stmt(body);
            }
            Stmt::DoWhile { body, cond, .. } => {
                self.walk_stmt(body);
                self.walk_expr(cond);
            }
            Stmt::Switch { disc, cases, .. } => {
                self.walk_expr(disc);
                for SwitchCase { test, body, .. } in cases {
                    if let Some(test) = test {
                        self.walk_expr(test);
                    }
                    self.walk_stmts(body);
                }
            }
            Stmt::Try { block, catch, finally, .. } => {
                self.walk_stmts(block);
                if let Some(CatchClause { param, body, .. }) = catch {
                    if let Some(param) = param {
                        self.walk_pattern(param);
                    }
                    self.walk_stmts(body);
                }
                if let Some(finally) = finally {
                    self.walk_stmts(finally);
                }
            }
            Stmt::Throw { arg, .. } => {
                if let Some(arg) = arg {
                    self.walk_expr(arg);
                }
            }
            Stmt::Block { body, .. } => self.walk_stmts(body),
            Stmt::With { object, body, .. } => {
                self.walk_expr(object);
                self.walk_stmt(body);
            }
            Stmt::Labeled { body, .. } => self.walk_stmt(body),
            Stmt::Export { decl, .. } => {
                if let Some(decl) = decl {
                    self.walk_stmt(decl);
                }
            }
            Stmt::Empty { .. }
            | Stmt::Debugger { .. }
            | Stmt::Break { .. }
            | Stmt::Continue { .. }
            | Stmt::Import { .. } => {}
        }
    }

    fn walk_pattern(&mut self, pat: &'a Pattern) {
        match pat {
            Pattern::Ident { .. } => {}
            Pattern::Object { props, .. } => {
                for (_, sub) in props {
                    self.walk_pattern(sub);
                }
            }
            Pattern::Array { elems, .. } => {
                for elem in elems.iter().flatten() {
                    self.walk_pattern(elem);
                }
            }
            Pattern::Default { inner, value, .. } => {
                self.walk_pattern(inner);
                self.walk_expr(value);
            }
            Pattern::Rest { inner, .. } => self.walk_pattern(inner),
        }
    }

    fn walk_expr(&mut self, expr: &'a Expr) {
        match expr {
            Expr::Function(def) => self.visit_function(def),
            Expr::Class(def) => self.visit_class(def),
            Expr::Ident { .. }
            | Expr::Literal { .. }
            | Expr::This { .. }
            | Expr::SuperRef { .. } => {}
            Expr::Template { exprs, .. } | Expr::Seq { exprs, .. } => {
                for e in exprs {
                    self.walk_expr(e);
                }
            }
            Expr::Array { elems, .. } => {
                for e in elems.iter().flatten() {
                    self.walk_expr(e);
                }
            }
            Expr::Object { props, .. } => {
                for prop in props {
                    match prop {
                        ObjectProp::KeyValue { value, .. } => self.walk_expr(value),
                        ObjectProp::Method(def) => self.visit_function(def),
                        ObjectProp::Spread { arg, .. } => self.walk_expr(arg),
                        ObjectProp::Shorthand { .. } => {}
                    }
                }
            }
            Expr::Unary { arg, .. } | Expr::Update { arg, .. } | Expr::Spread { arg, .. } => {
                self.walk_expr(arg)
            }
            Expr::Await { arg, .. } => self.walk_expr(arg),
            Expr::Yield { arg, .. } => {
                if let Some(arg) = arg {
                    self.walk_expr(arg);
                }
            }
            Expr::Binary { left, right, .. } => {
                self.walk_expr(left);
                self.walk_expr(right);
            }
            Expr::Assign { target, value, .. } => {
                self.walk_expr(target);
                self.walk_expr(value);
            }
            Expr::Cond { test, cons, alt, .. } => {
                self.walk_expr(test);
                self.walk_expr(cons);
                self.walk_expr(alt);
            }
            Expr::Call { callee, args, .. } | Expr::New { callee, args, .. } => {
                self.walk_expr(callee);
                for arg in args {
                    self.walk_expr(arg);
                }
            }
            Expr::Member { obj, prop, .. } => {
                self.walk_expr(obj);
                if let crate::parse::MemberProp::Computed(inner) = prop {
                    self.walk_expr(inner);
                }
            }
            Expr::TaggedTemplate { tag, quasi, .. } => {
                self.walk_expr(tag);
                self.walk_expr(quasi);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn keys(source: &str) -> Vec<(String, u32, u32)> {
        extract_functions(source)
            .keys
            .into_iter()
            .map(|k| (k.qualified_name, k.span.start_line, k.span.end_line))
            .collect()
    }

    #[test]
    fn test_nesting_rule() {
        let got = keys("function outer(){ function inner(){} }\n");
        assert_eq!(
            got,
            alloc::vec![("outer".to_string(), 1, 1), ("outer.inner".to_string(), 1, 1)]
        );
    }

    #[test]
    fn test_one_entry_per_construct() {
        let src = "function decl() {}\nconst arrow = () => {};\nconst obj = { method() {} };\n";
        let got = keys(src);
        assert_eq!(got.len(), 3);
        assert_eq!(got[0].0, "decl");
        assert_eq!(got[1].0, "arrow");
        assert_eq!(got[2].0, "method");
    }

    #[test]
    fn test_empty_file_has_no_functions() {
        assert!(keys("const a = 1;\n").is_empty());
        assert!(keys("").is_empty());
    }

    #[test]
    fn test_class_scoping_and_accessors() {
        let src = "class Box {\n  constructor() {}\n  get value() { return 1; }\n  set value(v) {}\n  static make() { return new Box(); }\n}\n";
        let got: Vec<String> = keys(src).into_iter().map(|k| k.0).collect();
        assert_eq!(
            got,
            alloc::vec![
                "Box.constructor".to_string(),
                "Box.get value".to_string(),
                "Box.set value".to_string(),
                "Box.make".to_string()
            ]
        );
    }

    #[test]
    fn test_anonymous_synthetic_names() {
        let src = "setTimeout(function () {}, 10);\nlisten((a) => a);\n";
        let got: Vec<String> = keys(src).into_iter().map(|k| k.0).collect();
        assert_eq!(got.len(), 2);
        assert!(got[0].starts_with("<anon@1:"), "{}", got[0]);
        assert!(got[1].starts_with("<anon@2:"), "{}", got[1]);
    }

    #[test]
    fn test_duplicate_names_get_suffixes() {
        let src = "function f() {}\nfunction f() {}\nfunction f() {}\n";
        let got: Vec<String> = keys(src).into_iter().map(|k| k.0).collect();
        assert_eq!(got, alloc::vec!["f".to_string(), "f#2".to_string(), "f#3".to_string()]);
    }

    #[test]
    fn test_inference_chain_names() {
        let src = "const api = {\n  handlers: {\n    onClick: function () {},\n  },\n};\nmodule.exports.start = () => {};\n";
        let got: Vec<String> = keys(src).into_iter().map(|k| k.0).collect();
        assert_eq!(got, alloc::vec!["onClick".to_string(), "start".to_string()]);
    }

    #[test]
    fn test_records_are_preorder_and_nested() {
        let src = "function a() {\n  const b = () => {\n    function c() {}\n  };\n}\nfunction d() {}\n";
        let stream = crate::lex::tokenize(src);
        let parsed = crate::parse::parse(&stream);
        let inv = inventory_program("x.js", &parsed.program);
        let names: Vec<&str> = inv.records.iter().map(|r| r.key.qualified_name.as_str()).collect();
        assert_eq!(names, alloc::vec!["a", "a.b", "a.b.c", "d"]);
        assert_eq!(inv.records[0].parent, None);
        assert_eq!(inv.records[1].parent, Some(0));
        assert_eq!(inv.records[2].parent, Some(1));
        assert_eq!(inv.records[3].parent, None);
        // Nested spans are contained in their parents.
        for (i, rec) in inv.records.iter().enumerate() {
            if let Some(p) = rec.parent {
                let parent = &inv.records[p].key.span;
                let child = &rec.key.span;
                assert!(parent.start_line <= child.start_line && child.end_line <= parent.end_line, "record {i}");
            }
        }
    }

    #[test]
    fn test_param_counts() {
        let src = "function f(a, { b, c }, [d], ...rest) {}\nconst g = () => 0;\n";
        let stream = crate::lex::tokenize(src);
        let parsed = crate::parse::parse(&stream);
        let inv = inventory_program("x.js", &parsed.program);
        assert_eq!(inv.records[0].param_count, 4);
        assert_eq!(inv.records[1].param_count, 0);
    }

    #[test]
    fn test_deterministic_output() {
        let src = "function a() { const h = () => {}; }\nclass K { m() {} }\n";
        let one = extract_functions(src);
        let two = extract_functions(src);
        assert_eq!(one.keys, two.keys);
        assert!(!one.partial);
    }

    #[test]
    fn test_partial_flag_on_recovered_errors() {
        let out = extract_functions("function ok() {}\nlet x = ((;\n");
        assert!(out.partial);
        assert!(!out.diagnostics.is_empty());
        assert_eq!(out.keys.len(), 1);
    }
}
