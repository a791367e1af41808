//! Syntax tree for the supported ES2017 subset.
//!
//! Nodes carry just enough structure for function discovery and metric
//! computation; semantic details irrelevant to either (operator precedence
//! beyond grouping, exact literal values) are kept as raw text.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use crate::span::SourceSpan;

#[derive(Debug, Clone, Default)]
pub struct Program {
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Var,
    Let,
    Const,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FnKind {
    Declaration,
    Expression,
    Arrow,
    Method,
    Getter,
    Setter,
    Constructor,
}

#[derive(Debug, Clone)]
pub enum FnBody {
    Block(Vec<Stmt>),
    /// Expression-bodied arrow.
    Expr(Box<Expr>),
}

#[derive(Debug, Clone)]
pub struct FunctionDef {
    /// Syntactic name: declarations, named function expressions, method keys.
    pub name: Option<String>,
    /// Name recovered from context (`const f = () => ...`, `{ m: function () {} }`).
    pub inferred_name: Option<String>,
    pub kind: FnKind,
    pub is_async: bool,
    pub is_generator: bool,
    pub params: Vec<Pattern>,
    pub body: FnBody,
    /// Full extent including any modifier keywords and the body braces.
    pub span: SourceSpan,
}

#[derive(Debug, Clone)]
pub enum Pattern {
    Ident { name: String, span: SourceSpan },
    Object { props: Vec<(String, Pattern)>, span: SourceSpan },
    Array { elems: Vec<Option<Pattern>>, span: SourceSpan },
    Default { inner: Box<Pattern>, value: Box<Expr>, span: SourceSpan },
    Rest { inner: Box<Pattern>, span: SourceSpan },
}

impl Pattern {
    pub fn span(&self) -> SourceSpan {
        match self {
            Pattern::Ident { span, .. }
            | Pattern::Object { span, .. }
            | Pattern::Array { span, .. }
            | Pattern::Default { span, .. }
            | Pattern::Rest { span, .. } => *span,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClassDef {
    pub name: Option<String>,
    pub inferred_name: Option<String>,
    pub superclass: Option<Box<Expr>>,
    pub members: Vec<ClassMember>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone)]
pub struct ClassMember {
    pub is_static: bool,
    /// Display key; `None` for computed keys.
    pub key: Option<String>,
    /// `None` for plain field members.
    pub func: Option<FunctionDef>,
    /// Field initializer when present.
    pub value: Option<Expr>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone)]
pub struct Declarator {
    pub pat: Pattern,
    pub init: Option<Expr>,
}

#[derive(Debug, Clone)]
pub enum ForInit {
    Decl(VarKind, Vec<Declarator>),
    Expr(Expr),
}

#[derive(Debug, Clone)]
pub enum ForLeft {
    Decl(VarKind, Pattern),
    Target(Expr),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForEachKind {
    In,
    Of,
}

#[derive(Debug, Clone)]
pub struct SwitchCase {
    /// `None` for the `default` clause.
    pub test: Option<Expr>,
    pub body: Vec<Stmt>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone)]
pub struct CatchClause {
    pub param: Option<Pattern>,
    pub body: Vec<Stmt>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone)]
pub enum Stmt {
    Expr { expr: Expr, span: SourceSpan },
    VarDecl { kind: VarKind, decls: Vec<Declarator>, span: SourceSpan },
    FunctionDecl(FunctionDef),
    ClassDecl(ClassDef),
    Return { arg: Option<Expr>, span: SourceSpan },
    If { cond: Expr, cons: Box<Stmt>, alt: Option<Box<Stmt>>, span: SourceSpan },
    For {
        init: Option<ForInit>,
        cond: Option<Expr>,
        update: Option<Expr>,
        body: Box<Stmt>,
        span: SourceSpan,
    },
    ForEach { each: ForEachKind, left: ForLeft, right: Expr, body: Box<Stmt>, span: SourceSpan },
    While { cond: Expr, body: Box<Stmt>, span: SourceSpan },
    DoWhile { body: Box<Stmt>, cond: Expr, span: SourceSpan },
    Switch { disc: Expr, cases: Vec<SwitchCase>, span: SourceSpan },
    Try {
        block: Vec<Stmt>,
        catch: Option<CatchClause>,
        finally: Option<Vec<Stmt>>,
        span: SourceSpan,
    },
    /// `arg` is absent only after a recovered restricted-production error.
    Throw { arg: Option<Expr>, span: SourceSpan },
    Break { label: Option<String>, span: SourceSpan },
    Continue { label: Option<String>, span: SourceSpan },
    Block { body: Vec<Stmt>, span: SourceSpan },
    Empty { span: SourceSpan },
    Debugger { span: SourceSpan },
    With { object: Expr, body: Box<Stmt>, span: SourceSpan },
    Labeled { label: String, body: Box<Stmt>, span: SourceSpan },
    Import { span: SourceSpan },
    Export { decl: Option<Box<Stmt>>, span: SourceSpan },
}

impl Stmt {
    pub fn span(&self) -> SourceSpan {
        match self {
            Stmt::Expr { span, .. }
            | Stmt::VarDecl { span, .. }
            | Stmt::Return { span, .. }
            | Stmt::If { span, .. }
            | Stmt::For { span, .. }
            | Stmt::ForEach { span, .. }
            | Stmt::While { span, .. }
            | Stmt::DoWhile { span, .. }
            | Stmt::Switch { span, .. }
            | Stmt::Try { span, .. }
            | Stmt::Throw { span, .. }
            | Stmt::Break { span, .. }
            | Stmt::Continue { span, .. }
            | Stmt::Block { span, .. }
            | Stmt::Empty { span }
            | Stmt::Debugger { span }
            | Stmt::With { span, .. }
            | Stmt::Labeled { span, .. }
            | Stmt::Import { span }
            | Stmt::Export { span, .. } => *span,
            Stmt::FunctionDecl(f) => f.span,
            Stmt::ClassDecl(c) => c.span,
        }
    }
}

#[derive(Debug, Clone)]
pub enum MemberProp {
    Static(String),
    Computed(Box<Expr>),
}

#[derive(Debug, Clone)]
pub enum PropName {
    Ident(String),
    Literal(String),
    Computed,
}

impl PropName {
    /// Display form used for name inference; computed keys have none.
    pub fn display(&self) -> Option<&str> {
        match self {
            PropName::Ident(s) => Some(s),
            PropName::Literal(s) => Some(s),
            PropName::Computed => None,
        }
    }
}

#[derive(Debug, Clone)]
pub enum ObjectProp {
    KeyValue { key: PropName, value: Expr, span: SourceSpan },
    Shorthand { name: String, span: SourceSpan },
    Method(FunctionDef),
    Spread { arg: Expr, span: SourceSpan },
}

#[derive(Debug, Clone)]
pub enum Expr {
    Ident { name: String, span: SourceSpan },
    /// Number, string, regex, `true`, `false`, `null`.
    Literal { raw: String, span: SourceSpan },
    Template { exprs: Vec<Expr>, span: SourceSpan },
    This { span: SourceSpan },
    SuperRef { span: SourceSpan },
    Array { elems: Vec<Option<Expr>>, span: SourceSpan },
    Object { props: Vec<ObjectProp>, span: SourceSpan },
    Function(Box<FunctionDef>),
    Class(Box<ClassDef>),
    Unary { op: String, arg: Box<Expr>, span: SourceSpan },
    Update { op: String, prefix: bool, arg: Box<Expr>, span: SourceSpan },
    Binary { op: String, left: Box<Expr>, right: Box<Expr>, span: SourceSpan },
    Assign { op: String, target: Box<Expr>, value: Box<Expr>, span: SourceSpan },
    Cond { test: Box<Expr>, cons: Box<Expr>, alt: Box<Expr>, span: SourceSpan },
    Call { callee: Box<Expr>, args: Vec<Expr>, span: SourceSpan },
    New { callee: Box<Expr>, args: Vec<Expr>, span: SourceSpan },
    Member { obj: Box<Expr>, prop: MemberProp, span: SourceSpan },
    Seq { exprs: Vec<Expr>, span: SourceSpan },
    Spread { arg: Box<Expr>, span: SourceSpan },
    Await { arg: Box<Expr>, span: SourceSpan },
    Yield { arg: Option<Box<Expr>>, delegate: bool, span: SourceSpan },
    TaggedTemplate { tag: Box<Expr>, quasi: Box<Expr>, span: SourceSpan },
}

impl Expr {
    pub fn span(&self) -> SourceSpan {
        match self {
            Expr::Ident { span, .. }
            | Expr::Literal { span, .. }
            | Expr::Template { span, .. }
            | Expr::This { span }
            | Expr::SuperRef { span }
            | Expr::Array { span, .. }
            | Expr::Object { span, .. }
            | Expr::Unary { span, .. }
            | Expr::Update { span, .. }
            | Expr::Binary { span, .. }
            | Expr::Assign { span, .. }
            | Expr::Cond { span, .. }
            | Expr::Call { span, .. }
            | Expr::New { span, .. }
            | Expr::Member { span, .. }
            | Expr::Seq { span, .. }
            | Expr::Spread { span, .. }
            | Expr::Await { span, .. }
            | Expr::Yield { span, .. }
            | Expr::TaggedTemplate { span, .. } => *span,
            Expr::Function(f) => f.span,
            Expr::Class(c) => c.span,
        }
    }

    pub fn is_function_like(&self) -> bool {
        matches!(self, Expr::Function(_) | Expr::Class(_))
    }
}
