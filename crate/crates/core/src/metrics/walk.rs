//! Shared traversal over a function's *own* code: every statement and
//! expression lexically inside the function but outside any nested function.
//! Nested function nodes are reported (so callers can count or classify them)
//! without descending into their parameters or bodies; class field
//! initializers count as own code of the enclosing function, class methods do
//! not.

use crate::parse::{
    CatchClause, ClassDef, ClassMember, Declarator, Expr, FnBody, ForInit, ForLeft, FunctionDef,
    MemberProp, ObjectProp, Pattern, Stmt, SwitchCase,
};

pub(crate) enum OwnNode<'a> {
    Stmt(&'a Stmt),
    Expr(&'a Expr),
    Case(&'a SwitchCase),
    Catch(&'a CatchClause),
}

/// Visits the own code of `def`: parameter defaults first, then the body.
pub(crate) fn walk_own_fn<'a>(def: &'a FunctionDef, f: &mut dyn FnMut(OwnNode<'a>)) {
    for param in &def.params {
        walk_pattern(param, f);
    }
    match &def.body {
        FnBody::Block(stmts) => walk_stmts(stmts, f),
        FnBody::Expr(expr) => walk_expr(expr, f),
    }
}

/// Visits statements outside any function (top-level program code).
pub(crate) fn walk_own_stmts<'a>(stmts: &'a [Stmt], f: &mut dyn FnMut(OwnNode<'a>)) {
    walk_stmts(stmts, f);
}

fn walk_stmts<'a>(stmts: &'a [Stmt], f: &mut dyn FnMut(OwnNode<'a>)) {
    for stmt in stmts {
        walk_stmt(stmt, f);
    }
}

fn walk_stmt<'a>(stmt: &'a Stmt, f: &mut dyn FnMut(OwnNode<'a>)) {
    f(OwnNode::Stmt(stmt));
    match stmt {
        Stmt::Expr { expr, .. } => walk_expr(expr, f),
        Stmt::VarDecl { decls, .. } => {
            for Declarator { pat, init } in decls {
                walk_pattern(pat, f);
                if let Some(init) = init {
                    walk_expr(init, f);
                }
            }
        }
        // Reported above; interior belongs to the nested function.
        Stmt::FunctionDecl(_) => {}
        Stmt::ClassDecl(def) => walk_class(def, f),
        Stmt::Return { arg, .. } => {
            if let Some(arg) = arg {
                walk_expr(arg, f);
            }
        }
        Stmt::If { cond, cons, alt, .. } => {
            walk_expr(cond, f);
            walk_stmt(cons, f);
            if let Some(alt) = alt {
                walk_stmt(alt, f);
            }
        }
        Stmt::For { init, cond, update, body, .. } => {
            match init {
                Some(ForInit::Decl(_, decls)) => {
                    for Declarator { pat, init } in decls {
                        walk_pattern(pat, f);
                        if let Some(init) = init {
                            walk_expr(init, f);
                        }
                    }
                }
                Some(ForInit::Expr(expr)) => walk_expr(expr, f),
                None => {}
            }
            if let Some(cond) = cond {
                walk_expr(cond, f);
            }
            if let Some(update) = update {
                walk_expr(update, f);
            }
            walk_stmt(body, f);
        }
        Stmt::ForEach { left, right, body, .. } => {
            match left {
                ForLeft::Decl(_, pat) => walk_pattern(pat, f),
                ForLeft::Target(expr) => walk_expr(expr, f),
            }
            walk_expr(right, f);
            walk_stmt(body, f);
        }
        Stmt::While { cond, body, .. } => {
            walk_expr(cond, f);
            walk_stmt(body, f);
        }
        Stmt::DoWhile { body, cond, .. } => {
            walk_stmt(body, f);
            walk_expr(cond, f);
        }
        Stmt::Switch { disc, cases, .. } => {
            walk_expr(disc, f);
            for case in cases {
                f(OwnNode::Case(case));
                if let Some(test) = &case.test {
                    walk_expr(test, f);
                }
                walk_stmts(&case.body, f);
            }
        }
        Stmt::Try { block, catch, finally, .. } => {
            walk_stmts(block, f);
            if let Some(clause) = catch {
                f(OwnNode::Catch(clause));
                if let Some(param) = &clause.param {
                    walk_pattern(param, f);
                }
                walk_stmts(&clause.body, f);
            }
            if let Some(finally) = finally {
                walk_stmts(finally, f);
            }
        }
        Stmt::Throw { arg, .. } => {
            if let Some(arg) = arg {
                walk_expr(arg, f);
            }
        }
        Stmt::Block { body, .. } => walk_stmts(body, f),
        Stmt::With { object, body, .. } => {
            walk_expr(object, f);
            walk_stmt(body, f);
        }
        Stmt::Labeled { body, .. } => walk_stmt(body, f),
        Stmt::Export { decl, .. } => {
            if let Some(decl) = decl {
                walk_stmt(decl, f);
            }
        }
        Stmt::Empty { .. }
        | Stmt::Debugger { .. }
        | Stmt::Break { .. }
        | Stmt::Continue { .. }
        | Stmt::Import { .. } => {}
    }
}

fn walk_class<'a>(def: &'a ClassDef, f: &mut dyn FnMut(OwnNode<'a>)) {
    if let Some(superclass) = &def.superclass {
        walk_expr(superclass, f);
    }
    for ClassMember { func, value, .. } in &def.members {
        // Method interiors are separate functions; field initializers are
        // own code of the enclosing function.
        let _ = func;
        if let Some(value) = value {
            walk_expr(value, f);
        }
    }
}

fn walk_pattern<'a>(pat: &'a Pattern, f: &mut dyn FnMut(OwnNode<'a>)) {
    match pat {
        Pattern::Ident { .. } => {}
        Pattern::Object { props, .. } => {
            for (_, sub) in props {
                walk_pattern(sub, f);
            }
        }
        Pattern::Array { elems, .. } => {
            for elem in elems.iter().flatten() {
                walk_pattern(elem, f);
            }
        }
        Pattern::Default { inner, value, .. } => {
            walk_pattern(inner, f);
            walk_expr(value, f);
        }
        Pattern::Rest { inner, .. } => walk_pattern(inner, f),
    }
}

fn walk_expr<'a>(expr: &'a Expr, f: &mut dyn FnMut(OwnNode<'a>)) {
    f(OwnNode::Expr(expr));
    match expr {
        // Reported above; interior excluded.
        Expr::Function(_) => {}
        Expr::Class(def) => walk_class(def, f),
        Expr::Ident { .. } | Expr::Literal { .. } | Expr::This { .. } | Expr::SuperRef { .. } => {}
        Expr::Template { exprs, .. } | Expr::Seq { exprs, .. } => {
            for e in exprs {
                walk_expr(e, f);
            }
        }
        Expr::Array { elems, .. } => {
            for e in elems.iter().flatten() {
                walk_expr(e, f);
            }
        }
        Expr::Object { props, .. } => {
            for prop in props {
                match prop {
                    ObjectProp::KeyValue { value, .. } => walk_expr(value, f),
                    // Method node is function-like: report without descending.
                    ObjectProp::Method(_) => {}
                    ObjectProp::Spread { arg, .. } => walk_expr(arg, f),
                    ObjectProp::Shorthand { .. } => {}
                }
            }
        }
        Expr::Unary { arg, .. }
        | Expr::Update { arg, .. }
        | Expr::Spread { arg, .. }
        | Expr::Await { arg, .. } => walk_expr(arg, f),
        Expr::Yield { arg, .. } => {
            if let Some(arg) = arg {
                walk_expr(arg, f);
            }
        }
        Expr::Binary { left, right, .. } => {
            walk_expr(left, f);
            walk_expr(right, f);
        }
        Expr::Assign { target, value, .. } => {
            walk_expr(target, f);
            walk_expr(value, f);
        }
        Expr::Cond { test, cons, alt, .. } => {
            walk_expr(test, f);
            walk_expr(cons, f);
            walk_expr(alt, f);
        }
        Expr::Call { callee, args, .. } | Expr::New { callee, args, .. } => {
            walk_expr(callee, f);
            for arg in args {
                walk_expr(arg, f);
            }
        }
        Expr::Member { obj, prop, .. } => {
            walk_expr(obj, f);
            if let MemberProp::Computed(inner) = prop {
                walk_expr(inner, f);
            }
        }
        Expr::TaggedTemplate { tag, quasi, .. } => {
            walk_expr(tag, f);
            walk_expr(quasi, f);
        }
    }
}
