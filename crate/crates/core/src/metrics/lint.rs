//! Built-in warning rules bucketed by severity.
//!
//! A deliberately small ruleset in the spirit of common JavaScript linters;
//! the warning *counts per severity* are the metric, not the individual
//! findings. Severities can be remapped per rule in the configuration.

use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::HashSet;

use crate::parse::{
    CatchClause, ClassDef, ClassMember, Declarator, Expr, FnBody, ForInit, ForLeft, FunctionDef,
    MemberProp, ObjectProp, Pattern, Stmt,
};

use super::walk::{walk_own_fn, OwnNode};
use super::{MetricsConfig, MetricsError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Info,
    Minor,
    Major,
    Critical,
    Blocker,
}

impl Severity {
    pub fn parse(name: &str) -> Option<Severity> {
        Some(match name {
            "info" => Severity::Info,
            "minor" => Severity::Minor,
            "major" => Severity::Major,
            "critical" => Severity::Critical,
            "blocker" => Severity::Blocker,
            _ => return None,
        })
    }
}

const RULE_COUNT: usize = 14;

/// Rule ids with their default severities.
pub const RULES: [(&str, Severity); RULE_COUNT] = [
    ("no-eval", Severity::Critical),
    ("no-with", Severity::Critical),
    ("no-new-func", Severity::Critical),
    ("implied-eval", Severity::Major),
    ("no-debugger", Severity::Major),
    ("no-cond-assign", Severity::Major),
    ("no-proto", Severity::Major),
    ("no-caller", Severity::Major),
    ("eqeqeq", Severity::Minor),
    ("no-unused-params", Severity::Minor),
    ("no-empty-catch", Severity::Minor),
    ("no-alert", Severity::Info),
    ("no-console", Severity::Info),
    ("no-var", Severity::Info),
];

#[derive(Debug, Clone)]
pub struct RuleSet {
    severities: [Severity; RULE_COUNT],
}

impl RuleSet {
    pub fn from_config(config: &MetricsConfig) -> Result<RuleSet, MetricsError> {
        let mut severities = [Severity::Info; RULE_COUNT];
        for (slot, (_, default)) in severities.iter_mut().zip(RULES.iter()) {
            *slot = *default;
        }
        for (rule, name) in &config.lint_severities {
            let idx = RULES
                .iter()
                .position(|(id, _)| id == rule)
                .ok_or_else(|| MetricsError::UnknownRule(rule.clone()))?;
            severities[idx] =
                Severity::parse(name).ok_or_else(|| MetricsError::UnknownSeverity(name.clone()))?;
        }
        Ok(RuleSet { severities })
    }

    fn severity_of(&self, rule: &str) -> Severity {
        let idx = RULES.iter().position(|(id, _)| *id == rule).expect("known rule id");
        self.severities[idx]
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WarningCounts {
    pub info: u32,
    pub minor: u32,
    pub major: u32,
    pub critical: u32,
    pub blocker: u32,
}

impl WarningCounts {
    fn add(&mut self, severity: Severity) {
        match severity {
            Severity::Info => self.info += 1,
            Severity::Minor => self.minor += 1,
            Severity::Major => self.major += 1,
            Severity::Critical => self.critical += 1,
            Severity::Blocker => self.blocker += 1,
        }
    }
}

fn is_string_literal(expr: &Expr) -> bool {
    matches!(expr, Expr::Literal { raw, .. } if raw.starts_with('"') || raw.starts_with('\''))
}

fn ident_name(expr: &Expr) -> Option<&str> {
    match expr {
        Expr::Ident { name, .. } => Some(name),
        _ => None,
    }
}

fn is_plain_assign(expr: &Expr) -> bool {
    matches!(expr, Expr::Assign { op, .. } if op == "=")
}

pub fn lint_function(def: &FunctionDef, rules: &RuleSet) -> WarningCounts {
    let mut counts = WarningCounts::default();
    let mut hit = |rule: &str| counts.add(rules.severity_of(rule));

    walk_own_fn(def, &mut |node| match node {
        OwnNode::Stmt(stmt) => match stmt {
            Stmt::With { .. } => hit("no-with"),
            Stmt::Debugger { .. } => hit("no-debugger"),
            Stmt::VarDecl { kind: crate::parse::VarKind::Var, .. } => hit("no-var"),
            Stmt::If { cond, .. } | Stmt::While { cond, .. } | Stmt::DoWhile { cond, .. } => {
                if is_plain_assign(cond) {
                    hit("no-cond-assign");
                }
            }
            Stmt::For { cond: Some(cond), .. } => {
                if is_plain_assign(cond) {
                    hit("no-cond-assign");
                }
            }
            _ => {}
        },
        OwnNode::Expr(expr) => match expr {
            Expr::Call { callee, args, .. } => match callee.as_ref() {
                Expr::Ident { name, .. } => match name.as_str() {
                    "eval" => hit("no-eval"),
                    "alert" | "confirm" | "prompt" => hit("no-alert"),
                    "setTimeout" | "setInterval" => {
                        if args.first().is_some_and(is_string_literal) {
                            hit("implied-eval");
                        }
                    }
                    _ => {}
                },
                Expr::Member { obj, .. } if ident_name(obj) == Some("console") => {
                    hit("no-console");
                }
                _ => {}
            },
            Expr::New { callee, .. } if ident_name(callee) == Some("Function") => {
                hit("no-new-func");
            }
            Expr::Member { obj, prop: MemberProp::Static(prop), .. } => {
                if prop == "__proto__" {
                    hit("no-proto");
                } else if (prop == "caller" || prop == "callee")
                    && ident_name(obj) == Some("arguments")
                {
                    hit("no-caller");
                }
            }
            Expr::Binary { op, .. } if op == "==" || op == "!=" => hit("eqeqeq"),
            _ => {}
        },
        OwnNode::Case(_) => {}
        OwnNode::Catch(clause) => {
            if clause.body.is_empty() {
                hit("no-empty-catch");
            }
        }
    });

    for _ in unused_params(def) {
        hit("no-unused-params");
    }
    counts
}

/// Names of plain top-level parameters never read anywhere in the body,
/// nested closures included. No shadowing analysis: a same-named identifier
/// in an inner scope counts as a use, which errs toward silence.
fn unused_params(def: &FunctionDef) -> Vec<String> {
    let mut candidates: Vec<&String> = Vec::new();
    for param in &def.params {
        if let Pattern::Ident { name, .. } = param {
            if !name.starts_with('_') {
                candidates.push(name);
            }
        }
    }
    if candidates.is_empty() {
        return Vec::new();
    }
    let mut used: HashSet<&str> = HashSet::new();
    match &def.body {
        FnBody::Block(stmts) => {
            for stmt in stmts {
                idents_in_stmt(stmt, &mut used);
            }
        }
        FnBody::Expr(expr) => idents_in_expr(expr, &mut used),
    }
    candidates.iter().filter(|name| !used.contains(name.as_str())).map(|n| (*n).clone()).collect()
}

fn idents_in_fn<'a>(def: &'a FunctionDef, used: &mut HashSet<&'a str>) {
    for param in &def.params {
        idents_in_pattern(param, used);
    }
    match &def.body {
        FnBody::Block(stmts) => {
            for stmt in stmts {
                idents_in_stmt(stmt, used);
            }
        }
        FnBody::Expr(expr) => idents_in_expr(expr, used),
    }
}

fn idents_in_pattern<'a>(pat: &'a Pattern, used: &mut HashSet<&'a str>) {
    // Only default values can *read* an identifier inside a pattern.
    match pat {
        Pattern::Ident { .. } => {}
        Pattern::Object { props, .. } => {
            for (_, sub) in props {
                idents_in_pattern(sub, used);
            }
        }
        Pattern::Array { elems, .. } => {
            for elem in elems.iter().flatten() {
                idents_in_pattern(elem, used);
            }
        }
        Pattern::Default { inner, value, .. } => {
            idents_in_pattern(inner, used);
            idents_in_expr(value, used);
        }
        Pattern::Rest { inner, .. } => idents_in_pattern(inner, used),
    }
}

fn idents_in_class<'a>(def: &'a ClassDef, used: &mut HashSet<&'a str>) {
    if let Some(superclass) = &def.superclass {
        idents_in_expr(superclass, used);
    }
    for ClassMember { func, value, .. } in &def.members {
        if let Some(func) = func {
            idents_in_fn(func, used);
        }
        if let Some(value) = value {
            idents_in_expr(value, used);
        }
    }
}

fn idents_in_stmt<'a>(stmt: &'a Stmt, used: &mut HashSet<&'a str>) {
    match stmt {
        Stmt::Expr { expr, .. } => idents_in_expr(expr, used),
        Stmt::VarDecl { decls, .. } => {
            for Declarator { pat, init } in decls {
                idents_in_pattern(pat, used);
                if let Some(init) = init {
                    idents_in_expr(init, used);
                }
            }
        }
        Stmt::FunctionDecl(def) => idents_in_fn(def, used),
        Stmt::ClassDecl(def) => idents_in_class(def, used),
        Stmt::Return { arg, .. } | Stmt::Throw { arg, .. } => {
            if let Some(arg) = arg {
                idents_in_expr(arg, used);
            }
        }
        Stmt::If { cond, cons, alt, .. } => {
            idents_in_expr(cond, used);
            idents_in_stmt(cons, used);
            if let Some(alt) = alt {
                idents_in_stmt(alt, used);
            }
        }
        Stmt::For { init, cond, update, body, .. } => {
            match init {
                Some(ForInit::Decl(_, decls)) => {
                    for Declarator { pat, init } in decls {
                        idents_in_pattern(pat, used);
                        if let Some(init) = init {
                            idents_in_expr(init, used);
                        }
                    }
                }
                Some(ForInit::Expr(expr)) => idents_in_expr(expr, used),
                None => {}
            }
            if let Some(cond) = cond {
                idents_in_expr(cond, used);
            }
            if let Some(update) = update {
                idents_in_expr(update, used);
            }
            idents_in_stmt(body, used);
        }
        Stmt::ForEach { left, right, body, .. } => {
            match left {
                ForLeft::Decl(_, pat) => idents_in_pattern(pat, used),
                ForLeft::Target(expr) => idents_in_expr(expr, used),
            }
            idents_in_expr(right, used);
            idents_in_stmt(body, used);
        }
        Stmt::While { cond, body, .. } => {
            idents_in_expr(cond, used);
            idents_in_stmt(body, used);
        }
        Stmt::DoWhile { body, cond, .. } => {
            idents_in_stmt(body, used);
            idents_in_expr(cond, used);
        }
        Stmt::Switch { disc, cases, .. } => {
            idents_in_expr(disc, used);
            for case in cases {
                if let Some(test) = &case.test {
                    idents_in_expr(test, used);
                }
                for inner in &case.body {
                    idents_in_stmt(inner, used);
                }
            }
        }
        Stmt::Try { block, catch, finally, .. } => {
            for inner in block {
                idents_in_stmt(inner, used);
            }
            if let Some(CatchClause { param, body, .. }) = catch {
                if let Some(param) = param {
                    idents_in_pattern(param, used);
                }
                for inner in body {
                    idents_in_stmt(inner, used);
                }
            }
            if let Some(finally) = finally {
                for inner in finally {
                    idents_in_stmt(inner, used);
                }
            }
        }
        Stmt::Block { body, .. } => {
            for inner in body {
                idents_in_stmt(inner, used);
            }
        }
        Stmt::With { object, body, .. } => {
            idents_in_expr(object, used);
            idents_in_stmt(body, used);
        }
        Stmt::Labeled { body, .. } => idents_in_stmt(body, used),
        Stmt::Export { decl, .. } => {
            if let Some(decl) = decl {
                idents_in_stmt(decl, used);
            }
        }
        Stmt::Empty { .. }
        | Stmt::Debugger { .. }
        | Stmt::Break { .. }
        | Stmt::Continue { .. }
        | Stmt::Import { .. } => {}
    }
}

fn idents_in_expr<'a>(expr: &'a Expr, used: &mut HashSet<&'a str>) {
    match expr {
        Expr::Ident { name, .. } => {
            used.insert(name);
        }
        // Shorthand properties read the binding they name.
        Expr::Object { props, .. } => {
            for prop in props {
                match prop {
                    ObjectProp::KeyValue { value, .. } => idents_in_expr(value, used),
                    ObjectProp::Shorthand { name, .. } => {
                        used.insert(name);
                    }
                    ObjectProp::Method(def) => idents_in_fn(def, used),
                    ObjectProp::Spread { arg, .. } => idents_in_expr(arg, used),
                }
            }
        }
        Expr::Function(def) => idents_in_fn(def, used),
        Expr::Class(def) => idents_in_class(def, used),
        Expr::Literal { .. } | Expr::This { .. } | Expr::SuperRef { .. } => {}
        Expr::Template { exprs, .. } | Expr::Seq { exprs, .. } => {
            for e in exprs {
                idents_in_expr(e, used);
            }
        }
        Expr::Array { elems, .. } => {
            for e in elems.iter().flatten() {
                idents_in_expr(e, used);
            }
        }
        Expr::Unary { arg, .. }
        | Expr::Update { arg, .. }
        | Expr::Spread { arg, .. }
        | Expr::Await { arg, .. } => idents_in_expr(arg, used),
        Expr::Yield { arg, .. } => {
            if let Some(arg) = arg {
                idents_in_expr(arg, used);
            }
        }
        Expr::Binary { left, right, .. } => {
            idents_in_expr(left, used);
            idents_in_expr(right, used);
        }
        Expr::Assign { target, value, .. } => {
            idents_in_expr(target, used);
            idents_in_expr(value, used);
        }
        Expr::Cond { test, cons, alt, .. } => {
            idents_in_expr(test, used);
            idents_in_expr(cons, used);
            idents_in_expr(alt, used);
        }
        Expr::Call { callee, args, .. } | Expr::New { callee, args, .. } => {
            idents_in_expr(callee, used);
            for arg in args {
                idents_in_expr(arg, used);
            }
        }
        Expr::Member { obj, prop, .. } => {
            idents_in_expr(obj, used);
            if let MemberProp::Computed(inner) = prop {
                idents_in_expr(inner, used);
            }
        }
        Expr::TaggedTemplate { tag, quasi, .. } => {
            idents_in_expr(tag, used);
            idents_in_expr(quasi, used);
        }
    }
}
