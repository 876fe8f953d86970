use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::{CodeGraph, CodeNode, EdgeKind, NodeKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    MissingRoot,
    ExtraRepo,
    DanglingEdge,
    SelfContains,
    MissingContainsParent,
    MultipleContainsParents,
    RootHasParent,
    ContainsCycle,
    ContainsKind,
    EdgeKind,
    ImplementsNotAllowed,
    VirtualContent,
    VirtualRange,
    BadRange,
    RangeOutsideParent,
    FileOf,
    QualifiedPath,
}

impl ViolationKind {
    pub fn label(self) -> &'static str {
        match self {
            ViolationKind::MissingRoot => "missing root",
            ViolationKind::ExtraRepo => "extra repo node",
            ViolationKind::DanglingEdge => "dangling edge",
            ViolationKind::SelfContains => "self contains",
            ViolationKind::MissingContainsParent => "missing contains-parent",
            ViolationKind::MultipleContainsParents => "multiple contains-parents",
            ViolationKind::RootHasParent => "root has contains-parent",
            ViolationKind::ContainsCycle => "contains cycle",
            ViolationKind::ContainsKind => "illegal contains kinds",
            ViolationKind::EdgeKind => "illegal edge endpoint kinds",
            ViolationKind::ImplementsNotAllowed => "implements not allowed",
            ViolationKind::VirtualContent => "virtual node has content",
            ViolationKind::VirtualRange => "virtual node has range",
            ViolationKind::BadRange => "bad line range",
            ViolationKind::RangeOutsideParent => "range outside parent",
            ViolationKind::FileOf => "wrong file_of",
            ViolationKind::QualifiedPath => "qualified path does not extend parent",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    /// Node id, or `src -KIND-> dst` for edges.
    pub subject: String,
    pub kind: ViolationKind,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.subject, self.kind.label())?;
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

struct Collector(Vec<Violation>);

impl Collector {
    fn push(&mut self, subject: impl Into<String>, kind: ViolationKind, detail: impl Into<String>) {
        self.0.push(Violation {
            subject: subject.into(),
            kind,
            detail: detail.into(),
        });
    }
}

fn contains_parent_ok(parent: NodeKind, child: NodeKind) -> bool {
    use NodeKind::*;
    match child {
        Repo => false,
        Package | File | TextFile => matches!(parent, Repo | Package),
        Class | Function | Attribute => matches!(parent, File | Class | Function),
    }
}

/// Checks every structural invariant of a code graph. Violations are
/// sorted by subject id, then kind.
pub fn validate_graph(graph: &CodeGraph) -> ValidationReport {
    let mut out = Collector(Vec::new());

    for e in graph.dangling_edges() {
        out.push(e.to_string(), ViolationKind::DanglingEdge, "endpoint not in graph");
    }

    match graph.node(graph.root()) {
        Some(n) if n.kind == NodeKind::Repo => {}
        Some(n) => out.push(&n.id, ViolationKind::MissingRoot, format!("root is {}", n.kind)),
        None => out.push(graph.root(), ViolationKind::MissingRoot, "root id not in graph"),
    }

    let mut parents: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for e in graph.edges() {
        let src = graph.node(&e.src).expect("indexed edge");
        let dst = graph.node(&e.dst).expect("indexed edge");
        match e.kind {
            EdgeKind::Contains => {
                if e.src == e.dst {
                    out.push(e.to_string(), ViolationKind::SelfContains, "");
                    continue;
                }
                parents.entry(&e.dst).or_default().push(&e.src);
                if !contains_parent_ok(src.kind, dst.kind) {
                    out.push(
                        e.to_string(),
                        ViolationKind::ContainsKind,
                        format!("{} cannot contain {}", src.kind, dst.kind),
                    );
                }
            }
            EdgeKind::Extends | EdgeKind::Implements => {
                if src.kind != NodeKind::Class || dst.kind != NodeKind::Class {
                    out.push(
                        e.to_string(),
                        ViolationKind::EdgeKind,
                        format!("{} -> {}", src.kind, dst.kind),
                    );
                }
                if e.kind == EdgeKind::Implements && !graph.language().has_interfaces() {
                    out.push(
                        e.to_string(),
                        ViolationKind::ImplementsNotAllowed,
                        graph.language().as_str(),
                    );
                }
            }
            EdgeKind::Imports => {
                let dst_ok = matches!(dst.kind, NodeKind::File | NodeKind::Class | NodeKind::Function);
                if src.kind != NodeKind::File || !dst_ok {
                    out.push(
                        e.to_string(),
                        ViolationKind::EdgeKind,
                        format!("{} -> {}", src.kind, dst.kind),
                    );
                }
            }
            EdgeKind::Calls => {
                let src_ok = matches!(src.kind, NodeKind::Function | NodeKind::File);
                let dst_ok = matches!(dst.kind, NodeKind::Function | NodeKind::Class);
                if !src_ok || !dst_ok {
                    out.push(
                        e.to_string(),
                        ViolationKind::EdgeKind,
                        format!("{} -> {}", src.kind, dst.kind),
                    );
                }
            }
        }
    }

    for node in graph.nodes() {
        check_node(graph, node, parents.get(node.id.as_str()), &mut out);
    }

    check_tree_reachability(graph, &parents, &mut out);

    let mut violations = out.0;
    violations.sort();
    violations.dedup();
    ValidationReport { violations }
}

fn check_node(graph: &CodeGraph, node: &CodeNode, parents: Option<&Vec<&str>>, out: &mut Collector) {
    let id = node.id.as_str();
    if node.kind == NodeKind::Repo && id != graph.root() {
        out.push(id, ViolationKind::ExtraRepo, "");
    }
    if node.kind.is_virtual() {
        if !node.content.is_empty() {
            out.push(id, ViolationKind::VirtualContent, "");
        }
        if !node.range.is_empty() {
            out.push(id, ViolationKind::VirtualRange, "");
        }
    }
    if !node.range.is_well_formed() {
        out.push(
            id,
            ViolationKind::BadRange,
            format!("{}..{}", node.range.start_line, node.range.end_line),
        );
    }

    let parents = parents.map(Vec::as_slice).unwrap_or(&[]);
    if id == graph.root() {
        if !parents.is_empty() {
            out.push(id, ViolationKind::RootHasParent, "");
        }
    } else if parents.is_empty() {
        out.push(id, ViolationKind::MissingContainsParent, "");
    } else if parents.len() > 1 {
        out.push(id, ViolationKind::MultipleContainsParents, parents.join(", "));
    }

    if let [parent_id] = parents {
        let parent = graph.node(parent_id).expect("indexed edge");
        let extends = if parent.qualified_path.is_empty() {
            !node.qualified_path.is_empty() && !node.qualified_path.starts_with('/')
        } else {
            node.qualified_path
                .strip_prefix(parent.qualified_path.as_str())
                .is_some_and(|rest| rest.starts_with('/') && rest.len() > 1)
        };
        if !extends {
            out.push(
                id,
                ViolationKind::QualifiedPath,
                format!("`{}` under `{}`", node.qualified_path, parent.qualified_path),
            );
        }
        if node.kind.is_in_file()
            && !parent.kind.is_file()
            && !node.range.is_empty()
            && !parent.range.contains(&node.range)
        {
            out.push(id, ViolationKind::RangeOutsideParent, "");
        }

        let expected_file = match parent.kind {
            _ if !node.kind.is_in_file() => None,
            NodeKind::File | NodeKind::TextFile => Some(parent.id.as_str()),
            _ => parent.file_of.as_deref(),
        };
        if node.file_of.as_deref() != expected_file {
            out.push(
                id,
                ViolationKind::FileOf,
                format!("expected {:?}, found {:?}", expected_file, node.file_of),
            );
        }
    } else if !node.kind.is_in_file() && node.file_of.is_some() {
        out.push(id, ViolationKind::FileOf, "must be absent");
    }
}

/// Every node must reach the root by following CONTAINS parents.
fn check_tree_reachability(
    graph: &CodeGraph,
    parents: &BTreeMap<&str, Vec<&str>>,
    out: &mut Collector,
) {
    let root = graph.root();
    let mut reaches: BTreeMap<&str, bool> = BTreeMap::new();
    for node in graph.nodes() {
        let mut path: Vec<&str> = Vec::new();
        let mut seen = BTreeSet::new();
        let mut cur = node.id.as_str();
        let ok = loop {
            if cur == root {
                break true;
            }
            if let Some(&known) = reaches.get(cur) {
                break known;
            }
            if !seen.insert(cur) {
                out.push(node.id.as_str(), ViolationKind::ContainsCycle, "");
                break false;
            }
            path.push(cur);
            match parents.get(cur).and_then(|p| p.first()) {
                Some(p) => cur = p,
                None => break false,
            }
        };
        for p in path {
            reaches.insert(p, ok);
        }
    }
}
