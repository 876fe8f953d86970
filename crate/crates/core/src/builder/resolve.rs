//! Reference resolution: IMPORTS, EXTENDS and CALLS edges from module
//! outlines. Resolution is static and conservative; anything that cannot be
//! tied to an in-repo entity is reported as a warning and left out.

use std::collections::{BTreeMap, BTreeSet};

use super::hierarchy::{item_id, Hierarchy};
use super::syntax::{CallSite, Callee, Import, Item, ItemKind, ModuleOutline, Receiver};
use super::{Warning, WarningKind};
use crate::graph::{CodeEdge, CodeGraph, EdgeKind, NodeKind};

const BUILTINS: &[&str] = &[
    "abs", "aiter", "all", "anext", "any", "ascii", "bin", "bool", "breakpoint", "bytearray",
    "bytes", "callable", "chr", "classmethod", "compile", "complex", "delattr", "dict", "dir",
    "divmod", "enumerate", "eval", "exec", "filter", "float", "format", "frozenset", "getattr",
    "globals", "hasattr", "hash", "help", "hex", "id", "input", "int", "isinstance",
    "issubclass", "iter", "len", "list", "locals", "map", "max", "memoryview", "min", "next",
    "object", "oct", "open", "ord", "pow", "print", "property", "range", "repr", "reversed",
    "round", "set", "setattr", "slice", "sorted", "staticmethod", "str", "sum", "super",
    "tuple", "type", "vars", "zip", "__import__", "__name__", "__file__", "NotImplemented",
    "Ellipsis", "BaseException", "Exception", "ArithmeticError", "AssertionError",
    "AttributeError", "EOFError", "ImportError", "IndexError", "KeyError", "KeyboardInterrupt",
    "LookupError", "MemoryError", "NameError", "NotImplementedError", "OSError",
    "OverflowError", "RecursionError", "RuntimeError", "StopIteration", "SyntaxError",
    "SystemExit", "TypeError", "ValueError", "ZeroDivisionError", "FileNotFoundError",
    "PermissionError", "TimeoutError", "UnicodeError", "Warning", "DeprecationWarning",
    "UserWarning",
];

fn is_builtin(name: &str) -> bool {
    BUILTINS.contains(&name)
}

fn is_dunder(name: &str) -> bool {
    name.len() > 4 && name.starts_with("__") && name.ends_with("__")
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Sym {
    /// In-repo module or package, by dotted name.
    Module(String),
    /// Class, function or attribute node.
    Node(String),
    External,
    Builtin,
}

#[derive(Debug, Clone)]
enum Local {
    Sym(Sym),
    /// A runtime value, with the dotted type it was annotated or built with.
    Value(Option<Vec<String>>),
}

type Frame = BTreeMap<String, Local>;

#[derive(Default)]
struct ClassInfo {
    bases: Vec<String>,
    /// Some base could not be resolved inside the repository.
    open: bool,
    members: BTreeMap<String, String>,
    methods: BTreeMap<String, String>,
}

struct Ctx<'a> {
    file_id: &'a str,
    path: &'a str,
    frames: Vec<Frame>,
    method_class: Option<String>,
}

struct Resolver<'h> {
    graph: &'h CodeGraph,
    outlines: &'h BTreeMap<String, (String, ModuleOutline)>,
    /// dotted module name -> FILE id
    modules: BTreeMap<String, String>,
    /// every importable dotted name, modules and their package prefixes
    packages: BTreeSet<String>,
    /// FILE id -> (primary module name, is package init)
    file_module: BTreeMap<String, (String, bool)>,
    namespaces: BTreeMap<String, BTreeMap<String, Sym>>,
    definitions: BTreeMap<String, BTreeSet<String>>,
    classes: BTreeMap<String, ClassInfo>,
    subclasses: BTreeMap<String, BTreeSet<String>>,
    mro_cache: BTreeMap<String, Vec<String>>,
    edges: BTreeSet<CodeEdge>,
    warnings: Vec<Warning>,
}

fn module_name(path: &str) -> (Vec<String>, bool) {
    let stem = path.strip_suffix(".py").unwrap_or(path);
    let mut parts: Vec<String> = stem.split('/').map(str::to_string).collect();
    let init = parts.last().is_some_and(|p| p == "__init__");
    if init {
        parts.pop();
    }
    (parts, init)
}

/// Adds IMPORTS, EXTENDS and CALLS edges to a hierarchy graph.
pub fn resolve_references(h: &Hierarchy) -> (CodeGraph, Vec<Warning>) {
    let mut r = Resolver::new(h);
    r.build_namespaces();
    r.collect_classes();
    r.emit_imports();
    r.emit_calls();

    let (lang, root, nodes, mut edges) = h.graph.clone().into_parts();
    edges.extend(r.edges);
    let graph = CodeGraph::new(lang, root, nodes, edges).expect("node set unchanged");
    (graph, r.warnings)
}

impl<'h> Resolver<'h> {
    fn new(h: &'h Hierarchy) -> Self {
        let mut modules = BTreeMap::new();
        let mut file_module = BTreeMap::new();
        let mut variants = Vec::new();
        for (fid, (path, _)) in &h.outlines {
            let (parts, init) = module_name(path);
            let name = parts.join(".");
            file_module.insert(fid.clone(), (name.clone(), init));
            if !name.is_empty() {
                modules.entry(name).or_insert_with(|| fid.clone());
            }
            if parts.len() > 1 && (parts[0] == "src" || parts[0] == "lib") {
                variants.push((parts[1..].join("."), fid.clone()));
            }
        }
        for (name, fid) in variants {
            modules.entry(name).or_insert(fid);
        }
        let mut packages = BTreeSet::new();
        for name in modules.keys() {
            let mut prefix = String::new();
            for part in name.split('.') {
                if !prefix.is_empty() {
                    prefix.push('.');
                }
                prefix.push_str(part);
                packages.insert(prefix.clone());
            }
        }
        Resolver {
            graph: &h.graph,
            outlines: &h.outlines,
            modules,
            packages,
            file_module,
            namespaces: BTreeMap::new(),
            definitions: BTreeMap::new(),
            classes: BTreeMap::new(),
            subclasses: BTreeMap::new(),
            mro_cache: BTreeMap::new(),
            edges: BTreeSet::new(),
            warnings: Vec::new(),
        }
    }

    fn warn(&mut self, path: &str, line: u32, kind: WarningKind, message: String) {
        self.warnings.push(Warning {
            path: path.to_string(),
            line,
            kind,
            message,
        });
    }

    fn edge(&mut self, src: &str, dst: &str, kind: EdgeKind) {
        self.edges.insert(CodeEdge::new(src, dst, kind));
    }

    fn node_kind(&self, id: &str) -> Option<NodeKind> {
        self.graph.node(id).map(|n| n.kind)
    }

    // ---- namespaces ----

    fn build_namespaces(&mut self) {
        for (fid, (path, outline)) in self.outlines {
            let mut ns = BTreeMap::new();
            let mut defs = BTreeSet::new();
            for item in &outline.items {
                let (id, _) = item_id(path, item);
                if !self.graph.contains_node(&id) {
                    continue;
                }
                for name in item.name.split(',').filter(|n| !n.contains('.')) {
                    ns.insert(name.to_string(), Sym::Node(id.clone()));
                    defs.insert(name.to_string());
                }
            }
            self.namespaces.insert(fid.clone(), ns);
            self.definitions.insert(fid.clone(), defs);
        }
        // imports may re-export each other, possibly cyclically
        let limit = self.outlines.len() + 2;
        for _ in 0..limit {
            let mut changed = false;
            for (fid, (_, outline)) in self.outlines {
                for imp in &outline.imports {
                    for (name, sym) in self.import_bindings(fid, imp) {
                        if self.definitions[fid].contains(&name) {
                            continue;
                        }
                        let ns = self.namespaces.get_mut(fid).expect("namespace exists");
                        if ns.get(&name) != Some(&sym) {
                            ns.insert(name, sym);
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }

    fn import_bindings(&self, fid: &str, imp: &Import) -> Vec<(String, Sym)> {
        match imp {
            Import::Module { path, alias, .. } => {
                let full = path.join(".");
                match alias {
                    Some(a) => {
                        let sym = if self.packages.contains(&full) {
                            Sym::Module(full)
                        } else {
                            Sym::External
                        };
                        vec![(a.clone(), sym)]
                    }
                    None => {
                        let head = path[0].clone();
                        let sym = if self.packages.contains(&head) {
                            Sym::Module(head.clone())
                        } else {
                            Sym::External
                        };
                        vec![(head, sym)]
                    }
                }
            }
            Import::From {
                level,
                module,
                names,
                ..
            } => {
                let Some(base) = self.import_base(fid, *level, module) else {
                    return names
                        .iter()
                        .map(|(n, a)| (a.clone().unwrap_or_else(|| n.clone()), Sym::External))
                        .collect();
                };
                if names.is_empty() {
                    let Some(src) = self.modules.get(&base) else {
                        return Vec::new();
                    };
                    return self.namespaces[src]
                        .iter()
                        .filter(|(n, _)| !n.starts_with('_'))
                        .map(|(n, s)| (n.clone(), s.clone()))
                        .collect();
                }
                names
                    .iter()
                    .filter_map(|(n, a)| {
                        let sym = self.module_member(&base, n)?;
                        Some((a.clone().unwrap_or_else(|| n.clone()), sym))
                    })
                    .collect()
            }
        }
    }

    /// Dotted module named by a `from` clause, if it is in the repository.
    fn import_base(&self, fid: &str, level: usize, module: &[String]) -> Option<String> {
        if level == 0 {
            let name = module.join(".");
            return self.packages.contains(&name).then_some(name);
        }
        let (own, init) = self.file_module.get(fid)?;
        let mut parts: Vec<&str> = if own.is_empty() {
            Vec::new()
        } else {
            own.split('.').collect()
        };
        if !init {
            parts.pop();
        }
        for _ in 1..level {
            parts.pop()?;
        }
        parts.extend(module.iter().map(String::as_str));
        let name = parts.join(".");
        (name.is_empty() || self.packages.contains(&name)).then_some(name)
    }

    fn module_member(&self, module: &str, name: &str) -> Option<Sym> {
        if let Some(sym) = self
            .modules
            .get(module)
            .and_then(|f| self.namespaces[f].get(name))
        {
            return Some(sym.clone());
        }
        let sub = if module.is_empty() {
            name.to_string()
        } else {
            format!("{module}.{name}")
        };
        self.packages.contains(&sub).then_some(Sym::Module(sub))
    }

    fn class_member(&mut self, class: &str, name: &str) -> Option<String> {
        for c in self.mro(class) {
            if let Some(id) = self.classes.get(&c).and_then(|i| i.members.get(name)) {
                return Some(id.clone());
            }
        }
        None
    }

    fn member(&mut self, sym: Sym, name: &str) -> Option<Sym> {
        match sym {
            Sym::Module(m) => self.module_member(&m, name),
            Sym::Node(id) if self.node_kind(&id) == Some(NodeKind::Class) => {
                self.class_member(&id, name).map(Sym::Node)
            }
            Sym::Node(_) => None,
            Sym::External => Some(Sym::External),
            Sym::Builtin => Some(Sym::Builtin),
        }
    }

    fn lookup(&self, ctx: &Ctx, name: &str) -> Option<Local> {
        for frame in ctx.frames.iter().rev() {
            if let Some(l) = frame.get(name) {
                return Some(l.clone());
            }
        }
        if let Some(sym) = self.namespaces[ctx.file_id].get(name) {
            return Some(Local::Sym(sym.clone()));
        }
        is_builtin(name).then_some(Local::Sym(Sym::Builtin))
    }

    /// Resolves a dotted path to a symbol. Paths rooted at a runtime value
    /// give `Ok(None)`; unknown heads give `Err(())`.
    fn resolve_path(&mut self, ctx: &Ctx, path: &[String]) -> Result<Option<Sym>, ()> {
        let mut sym = match self.lookup(ctx, &path[0]) {
            Some(Local::Sym(s)) => s,
            Some(Local::Value(_)) => return Ok(None),
            None => return Err(()),
        };
        for part in &path[1..] {
            match self.member(sym, part) {
                Some(s) => sym = s,
                None => return Err(()),
            }
        }
        Ok(Some(sym))
    }

    fn resolve_class(&mut self, ctx: &Ctx, path: &[String]) -> Option<String> {
        match self.resolve_path(ctx, path) {
            Ok(Some(Sym::Node(id))) if self.node_kind(&id) == Some(NodeKind::Class) => Some(id),
            _ => None,
        }
    }

    // ---- classes ----

    fn collect_classes(&mut self) {
        let outlines = self.outlines;
        for (path, outline) in outlines.values() {
            self.register_classes(path, &outline.items);
        }
        let outlines = self.outlines;
        for (fid, (path, outline)) in outlines {
            let mut ctx = Ctx {
                file_id: fid,
                path,
                frames: Vec::new(),
                method_class: None,
            };
            self.resolve_bases(&mut ctx, path, &outline.items);
        }
        for (id, info) in &self.classes {
            for b in &info.bases {
                self.subclasses.entry(b.clone()).or_default().insert(id.clone());
            }
        }
    }

    fn register_classes(&mut self, parent_qp: &str, items: &[Item]) {
        for item in items {
            let (id, qp) = item_id(parent_qp, item);
            if !self.graph.contains_node(&id) {
                continue;
            }
            if item.kind == ItemKind::Class {
                let mut info = ClassInfo::default();
                for child in &item.children {
                    let (cid, _) = item_id(&qp, child);
                    if !self.graph.contains_node(&cid) {
                        continue;
                    }
                    for name in child.name.split(',').filter(|n| !n.contains('.')) {
                        info.members.insert(name.to_string(), cid.clone());
                    }
                    if child.kind == ItemKind::Function {
                        info.methods.insert(child.name.clone(), cid.clone());
                    }
                }
                self.classes.insert(id.clone(), info);
            }
            self.register_classes(&qp, &item.children);
        }
    }

    fn resolve_bases(&mut self, ctx: &mut Ctx, parent_qp: &str, items: &[Item]) {
        for item in items {
            let (id, qp) = item_id(parent_qp, item);
            if !self.graph.contains_node(&id) {
                continue;
            }
            match item.kind {
                ItemKind::Class => {
                    let mut bases = Vec::new();
                    let mut open = false;
                    for base in &item.bases {
                        match self.resolve_path(ctx, &base.path) {
                            Ok(Some(Sym::Node(b))) if self.node_kind(&b) == Some(NodeKind::Class) => {
                                if b != id && !bases.contains(&b) {
                                    bases.push(b);
                                }
                            }
                            Ok(Some(Sym::External)) => open = true,
                            Ok(Some(Sym::Builtin)) => open |= base.path[0] != "object",
                            _ => {
                                open = true;
                                self.warn(
                                    ctx.path,
                                    base.line,
                                    WarningKind::UnresolvedBase,
                                    format!("`{}` for class `{}`", base.path.join("."), item.name),
                                );
                            }
                        }
                    }
                    for b in &bases {
                        self.edge(&id, b, EdgeKind::Extends);
                    }
                    let info = self.classes.get_mut(&id).expect("class registered");
                    info.bases = bases;
                    info.open = open;
                    self.resolve_bases(ctx, &qp, &item.children);
                }
                ItemKind::Function => {
                    let frame = self.function_frame(&qp, item);
                    ctx.frames.push(frame);
                    self.resolve_bases(ctx, &qp, &item.children);
                    ctx.frames.pop();
                }
                ItemKind::Attribute => {}
            }
        }
    }

    /// C3 linearization over in-repo bases; falls back to a depth-first
    /// order when the hierarchy is inconsistent.
    fn mro(&mut self, class: &str) -> Vec<String> {
        if let Some(m) = self.mro_cache.get(class) {
            return m.clone();
        }
        let mut visiting = BTreeSet::new();
        let m = self
            .c3(class, &mut visiting)
            .unwrap_or_else(|| self.dfs_order(class));
        self.mro_cache.insert(class.to_string(), m.clone());
        m
    }

    fn c3(&self, class: &str, visiting: &mut BTreeSet<String>) -> Option<Vec<String>> {
        if !visiting.insert(class.to_string()) {
            return None;
        }
        let bases = self.classes.get(class).map(|i| i.bases.clone()).unwrap_or_default();
        let mut seqs: Vec<Vec<String>> = Vec::new();
        for b in &bases {
            seqs.push(self.c3(b, visiting)?);
        }
        seqs.push(bases);
        visiting.remove(class);
        let mut out = vec![class.to_string()];
        loop {
            seqs.retain(|s| !s.is_empty());
            if seqs.is_empty() {
                return Some(out);
            }
            let head = seqs
                .iter()
                .map(|s| &s[0])
                .find(|h| !seqs.iter().any(|s| s[1..].contains(h)))?
                .clone();
            for s in &mut seqs {
                if s[0] == head {
                    s.remove(0);
                }
            }
            out.push(head);
        }
    }

    fn dfs_order(&self, class: &str) -> Vec<String> {
        let mut out = Vec::new();
        let mut stack = vec![class.to_string()];
        while let Some(c) = stack.pop() {
            if out.contains(&c) {
                continue;
            }
            if let Some(info) = self.classes.get(&c) {
                stack.extend(info.bases.iter().rev().cloned());
            }
            out.push(c);
        }
        out
    }

    fn declaring(&mut self, mro: &[String], method: &str) -> Option<String> {
        mro.iter()
            .find_map(|c| self.classes.get(c).and_then(|i| i.methods.get(method)).cloned())
    }

    fn is_open(&mut self, class: &str) -> bool {
        self.mro(class)
            .iter()
            .any(|c| self.classes.get(c).is_some_and(|i| i.open))
    }

    /// Possible targets of `x.method()` with `x` statically of type `class`:
    /// the inherited definition plus every override below `class`.
    fn dispatch(&mut self, class: &str, method: &str) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mro = self.mro(class);
        out.extend(self.declaring(&mro, method));
        let mut stack: Vec<String> = self
            .subclasses
            .get(class)
            .map(|s| s.iter().cloned().collect())
            .unwrap_or_default();
        let mut seen = BTreeSet::new();
        while let Some(sub) = stack.pop() {
            if !seen.insert(sub.clone()) {
                continue;
            }
            if let Some(m) = self.classes.get(&sub).and_then(|i| i.methods.get(method)) {
                out.insert(m.clone());
            }
            if let Some(s) = self.subclasses.get(&sub) {
                stack.extend(s.iter().cloned());
            }
        }
        out
    }

    // ---- imports ----

    fn emit_imports(&mut self) {
        let outlines = self.outlines;
        for (fid, (path, outline)) in outlines {
            for imp in &outline.imports {
                self.emit_import(fid, path, imp);
            }
        }
    }

    fn import_target(&self, sym: &Sym) -> Option<String> {
        match sym {
            Sym::Module(m) => self.modules.get(m).cloned(),
            Sym::Node(id) => match self.graph.node(id)?.kind {
                NodeKind::Class | NodeKind::Function => Some(id.clone()),
                _ => self.graph.node(id)?.file_of.clone(),
            },
            _ => None,
        }
    }

    fn emit_import(&mut self, fid: &str, path: &str, imp: &Import) {
        let line = imp.line();
        let mut targets = Vec::new();
        match imp {
            Import::Module { path: m, .. } => {
                let full = m.join(".");
                if let Some(f) = self.modules.get(&full) {
                    targets.push(f.clone());
                } else if !self.packages.contains(&full) {
                    self.warn(path, line, WarningKind::UnresolvedImport, format!("module `{full}`"));
                }
            }
            Import::From {
                level,
                module,
                names,
                ..
            } => {
                let shown = format!("{}{}", ".".repeat(*level), module.join("."));
                let Some(base) = self.import_base(fid, *level, module) else {
                    self.warn(path, line, WarningKind::UnresolvedImport, format!("module `{shown}`"));
                    return;
                };
                if names.is_empty() {
                    targets.extend(self.modules.get(&base).cloned());
                }
                for (n, _) in names {
                    match self.module_member(&base, n) {
                        Some(sym) => targets.extend(self.import_target(&sym)),
                        None => self.warn(
                            path,
                            line,
                            WarningKind::UnresolvedImport,
                            format!("`{n}` from `{shown}`"),
                        ),
                    }
                }
            }
        }
        for t in targets {
            if t != fid {
                self.edge(fid, &t, EdgeKind::Imports);
            }
        }
    }

    // ---- calls ----

    fn function_frame(&self, qp: &str, item: &Item) -> Frame {
        let mut frame = Frame::new();
        for child in &item.children {
            let (cid, _) = item_id(qp, child);
            for name in child.name.split(',').filter(|n| !n.contains('.')) {
                let local = if child.kind == ItemKind::Attribute || !self.graph.contains_node(&cid) {
                    Local::Value(None)
                } else {
                    Local::Sym(Sym::Node(cid.clone()))
                };
                frame.insert(name.to_string(), local);
            }
        }
        for p in &item.params {
            frame.insert(p.name.clone(), Local::Value(p.annotation.clone()));
        }
        for b in &item.bindings {
            frame.insert(b.name.clone(), Local::Value(Some(b.constructor.clone())));
        }
        frame
    }

    fn emit_calls(&mut self) {
        let outlines = self.outlines;
        for (fid, (path, outline)) in outlines {
            let mut ctx = Ctx {
                file_id: fid,
                path,
                frames: Vec::new(),
                method_class: None,
            };
            let mut top = Frame::new();
            for b in &outline.bindings {
                top.insert(b.name.clone(), Local::Value(Some(b.constructor.clone())));
            }
            // module-level constructor bindings type receivers everywhere in the file
            ctx.frames.push(top);
            for call in &outline.calls {
                self.emit_call(&ctx, fid, call);
            }
            self.walk_calls(&mut ctx, path, &outline.items);
        }
    }

    fn walk_calls(&mut self, ctx: &mut Ctx, parent_qp: &str, items: &[Item]) {
        for item in items {
            let (id, qp) = item_id(parent_qp, item);
            if !self.graph.contains_node(&id) {
                continue;
            }
            match item.kind {
                ItemKind::Class => {
                    let mut frame = Frame::new();
                    if let Some(info) = self.classes.get(&id) {
                        for (n, m) in &info.members {
                            frame.insert(n.clone(), Local::Sym(Sym::Node(m.clone())));
                        }
                    }
                    ctx.frames.push(frame);
                    let file_id = ctx.file_id.to_string();
                    for call in &item.calls {
                        self.emit_call(ctx, &file_id, call);
                    }
                    ctx.frames.pop();
                    let saved = ctx.method_class.replace(id.clone());
                    self.walk_calls(ctx, &qp, &item.children);
                    ctx.method_class = saved;
                }
                ItemKind::Function => {
                    let frame = self.function_frame(&qp, item);
                    ctx.frames.push(frame);
                    for call in &item.calls {
                        self.emit_call(ctx, &id, call);
                    }
                    self.walk_calls(ctx, &qp, &item.children);
                    ctx.frames.pop();
                }
                ItemKind::Attribute => {}
            }
        }
    }

    fn emit_call(&mut self, ctx: &Ctx, src: &str, call: &CallSite) {
        let line = call.line;
        match &call.callee {
            Callee::Name(name) => match self.lookup(ctx, name) {
                Some(Local::Sym(Sym::Node(id))) => {
                    if matches!(self.node_kind(&id), Some(NodeKind::Function | NodeKind::Class)) {
                        self.edge(src, &id, EdgeKind::Calls);
                    }
                }
                Some(_) => {}
                None => self.warn(ctx.path, line, WarningKind::UnresolvedCall, format!("`{name}`")),
            },
            Callee::Method {
                receiver: Receiver::Super,
                method,
            } => {
                let Some(class) = ctx.method_class.clone() else {
                    return;
                };
                let mro = self.mro(&class);
                match self.declaring(&mro[1..], method) {
                    Some(t) => self.edge(src, &t, EdgeKind::Calls),
                    None => self.missing_method(ctx, line, &class, method),
                }
            }
            Callee::Method {
                receiver: Receiver::Other,
                ..
            } => {}
            Callee::Method {
                receiver: Receiver::Path(p),
                method,
            } => self.method_call(ctx, src, line, p, method),
        }
    }

    fn missing_method(&mut self, ctx: &Ctx, line: u32, class: &str, method: &str) {
        if is_dunder(method) || self.is_open(class) {
            return;
        }
        let name = self.graph.node(class).map(|n| n.name.clone()).unwrap_or_default();
        self.warn(
            ctx.path,
            line,
            WarningKind::UnresolvedMethod,
            format!("`{method}` on `{name}`"),
        );
    }

    fn dispatch_edges(&mut self, ctx: &Ctx, src: &str, line: u32, class: &str, method: &str) {
        let targets = self.dispatch(class, method);
        if targets.is_empty() {
            self.missing_method(ctx, line, class, method);
        }
        for t in targets {
            self.edge(src, &t, EdgeKind::Calls);
        }
    }

    fn method_call(&mut self, ctx: &Ctx, src: &str, line: u32, p: &[String], method: &str) {
        let shown = || format!("`{}.{method}`", p.join("."));
        if p.len() == 1 && (p[0] == "self" || p[0] == "cls") {
            if let Some(class) = ctx.method_class.clone() {
                self.dispatch_edges(ctx, src, line, &class, method);
                return;
            }
        }
        if p.len() == 1 {
            if let Some(Local::Value(ty)) = self.lookup(ctx, &p[0]) {
                let class = ty.and_then(|t| self.resolve_class(ctx, &t));
                match class {
                    Some(c) => self.dispatch_edges(ctx, src, line, &c, method),
                    None => self.warn(ctx.path, line, WarningKind::UnresolvedReceiver, shown()),
                }
                return;
            }
        }
        match self.resolve_path(ctx, p) {
            Ok(Some(Sym::Node(id))) => match self.node_kind(&id) {
                Some(NodeKind::Class) => match self.class_member(&id, method) {
                    Some(t) if matches!(self.node_kind(&t), Some(NodeKind::Function | NodeKind::Class)) => {
                        self.edge(src, &t, EdgeKind::Calls)
                    }
                    Some(_) => {}
                    None => self.missing_method(ctx, line, &id, method),
                },
                Some(NodeKind::Attribute) => match self.attribute_type(&id) {
                    Some(c) => self.dispatch_edges(ctx, src, line, &c, method),
                    None => self.warn(ctx.path, line, WarningKind::UnresolvedReceiver, shown()),
                },
                _ => self.warn(ctx.path, line, WarningKind::UnresolvedReceiver, shown()),
            },
            Ok(Some(Sym::Module(m))) => match self.module_member(&m, method) {
                Some(Sym::Node(t)) => {
                    if matches!(self.node_kind(&t), Some(NodeKind::Function | NodeKind::Class)) {
                        self.edge(src, &t, EdgeKind::Calls);
                    }
                }
                Some(_) => {}
                None => self.warn(ctx.path, line, WarningKind::UnresolvedCall, shown()),
            },
            Ok(_) => {}
            Err(()) => self.warn(ctx.path, line, WarningKind::UnresolvedReceiver, shown()),
        }
    }

    /// Class of a module-level `name = Ctor()` attribute.
    fn attribute_type(&mut self, attr: &str) -> Option<String> {
        let node = self.graph.node(attr)?;
        let fid = node.file_of.clone()?;
        let (path, outline) = self.outlines.get(&fid)?;
        let binding = outline.bindings.iter().find(|b| b.name == node.name)?;
        let ctx = Ctx {
            file_id: &fid,
            path,
            frames: Vec::new(),
            method_class: None,
        };
        let ctor = binding.constructor.clone();
        self.resolve_class(&ctx, &ctor)
    }
}
