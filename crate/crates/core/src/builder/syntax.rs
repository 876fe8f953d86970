//! Language-neutral outline of one source module, as produced by a
//! [`SyntaxProvider`]. The graph builder consumes only this outline, so
//! tests can hand-build modules without going through a real parser.

use crate::graph::{LineRange, SubjectLanguage};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ItemKind {
    Class,
    Function,
    Attribute,
}

/// A dotted name as written in source, e.g. `pkg.mod.Base`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NameRef {
    pub path: Vec<String>,
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub annotation: Option<Vec<String>>,
}

/// `name = Ctor(...)` inside a scope; `constructor` is the dotted callee.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binding {
    pub name: String,
    pub constructor: Vec<String>,
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Receiver {
    /// `a.b.m()` has receiver path `["a", "b"]`.
    Path(Vec<String>),
    /// `super().m()`
    Super,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Callee {
    Name(String),
    Method { receiver: Receiver, method: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallSite {
    pub line: u32,
    pub callee: Callee,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Import {
    /// `import a.b [as c]`
    Module {
        path: Vec<String>,
        alias: Option<String>,
        line: u32,
    },
    /// `from [.]*a.b import x [as y], ...`; `names` empty means `*`.
    From {
        level: usize,
        module: Vec<String>,
        names: Vec<(String, Option<String>)>,
        line: u32,
    },
}

impl Import {
    pub fn line(&self) -> u32 {
        match self {
            Import::Module { line, .. } | Import::From { line, .. } => *line,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Item {
    pub kind: ItemKind,
    pub name: String,
    pub range: LineRange,
    /// Base classes (classes only).
    pub bases: Vec<NameRef>,
    /// Parameters (functions only).
    pub params: Vec<Param>,
    pub children: Vec<Item>,
    /// Calls made directly in this item's body, excluding nested items.
    pub calls: Vec<CallSite>,
    pub bindings: Vec<Binding>,
}

impl Item {
    pub fn new(kind: ItemKind, name: impl Into<String>, range: LineRange) -> Self {
        Item {
            kind,
            name: name.into(),
            range,
            bases: Vec::new(),
            params: Vec::new(),
            children: Vec::new(),
            calls: Vec::new(),
            bindings: Vec::new(),
        }
    }
}

/// Outline of one module (file).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ModuleOutline {
    pub items: Vec<Item>,
    /// All import statements in the file, wherever they occur.
    pub imports: Vec<Import>,
    /// Calls at module level (outside any function body).
    pub calls: Vec<CallSite>,
    pub bindings: Vec<Binding>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    pub line: u32,
    pub message: String,
}

/// Parser backend for one subject language.
pub trait SyntaxProvider: Send + Sync {
    fn language(&self) -> SubjectLanguage;

    /// Whether a repository-relative path is a source file of this language.
    fn handles(&self, path: &str) -> bool;

    fn parse(&self, source: &str) -> Result<ModuleOutline, SyntaxError>;
}
