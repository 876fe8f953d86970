//! Repository code graph data model.
//!
//! A [`CodeGraph`] is a directed graph of typed code entities. `CONTAINS`
//! edges form a spanning tree rooted at the single `REPO` node; reference
//! edges (`CALLS`, `EXTENDS`, `IMPORTS`, `IMPLEMENTS`) connect entities
//! horizontally and may form cycles.

mod io;
mod ops;
mod validate;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use io::{from_json, read_graph_file, to_json, write_graph_file, SCHEMA_VERSION};
pub use ops::{downstream_closure, induce_subgraph, neighbors, Direction};
pub use validate::{validate_graph, ValidationReport, Violation, ViolationKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum NodeKind {
    Repo,
    Package,
    File,
    TextFile,
    Class,
    Function,
    Attribute,
}

impl NodeKind {
    pub const ALL: [NodeKind; 7] = [
        NodeKind::Repo,
        NodeKind::Package,
        NodeKind::File,
        NodeKind::TextFile,
        NodeKind::Class,
        NodeKind::Function,
        NodeKind::Attribute,
    ];

    /// Lowercase prefix used in node ids.
    pub fn id_prefix(self) -> &'static str {
        match self {
            NodeKind::Repo => "repo",
            NodeKind::Package => "package",
            NodeKind::File => "file",
            NodeKind::TextFile => "textfile",
            NodeKind::Class => "class",
            NodeKind::Function => "function",
            NodeKind::Attribute => "attribute",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            NodeKind::Repo => "REPO",
            NodeKind::Package => "PACKAGE",
            NodeKind::File => "FILE",
            NodeKind::TextFile => "TEXTFILE",
            NodeKind::Class => "CLASS",
            NodeKind::Function => "FUNCTION",
            NodeKind::Attribute => "ATTRIBUTE",
        }
    }

    /// REPO and PACKAGE carry no source text of their own.
    pub fn is_virtual(self) -> bool {
        matches!(self, NodeKind::Repo | NodeKind::Package)
    }

    pub fn is_file(self) -> bool {
        matches!(self, NodeKind::File | NodeKind::TextFile)
    }

    /// Entities that live inside a source file.
    pub fn is_in_file(self) -> bool {
        matches!(
            self,
            NodeKind::Class | NodeKind::Function | NodeKind::Attribute
        )
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum EdgeKind {
    Contains,
    Calls,
    Extends,
    Imports,
    Implements,
}

impl EdgeKind {
    pub const ALL: [EdgeKind; 5] = [
        EdgeKind::Contains,
        EdgeKind::Calls,
        EdgeKind::Extends,
        EdgeKind::Imports,
        EdgeKind::Implements,
    ];

    pub fn label(self) -> &'static str {
        match self {
            EdgeKind::Contains => "CONTAINS",
            EdgeKind::Calls => "CALLS",
            EdgeKind::Extends => "EXTENDS",
            EdgeKind::Imports => "IMPORTS",
            EdgeKind::Implements => "IMPLEMENTS",
        }
    }

    pub fn is_reference(self) -> bool {
        self != EdgeKind::Contains
    }

    fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A small set of edge kinds, used as a traversal filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct EdgeKindSet(u8);

impl EdgeKindSet {
    pub fn all() -> Self {
        EdgeKind::ALL.iter().copied().collect()
    }

    pub fn empty() -> Self {
        EdgeKindSet(0)
    }

    pub fn only(kind: EdgeKind) -> Self {
        EdgeKindSet(kind.bit())
    }

    pub fn references() -> Self {
        EdgeKind::ALL
            .iter()
            .copied()
            .filter(|k| k.is_reference())
            .collect()
    }

    pub fn with(self, kind: EdgeKind) -> Self {
        EdgeKindSet(self.0 | kind.bit())
    }

    pub fn contains(self, kind: EdgeKind) -> bool {
        self.0 & kind.bit() != 0
    }
}

impl FromIterator<EdgeKind> for EdgeKindSet {
    fn from_iter<I: IntoIterator<Item = EdgeKind>>(iter: I) -> Self {
        iter.into_iter().fold(EdgeKindSet::empty(), EdgeKindSet::with)
    }
}

/// Declared language of the source files a graph was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubjectLanguage {
    Python,
    Java,
}

impl SubjectLanguage {
    /// Only languages with interfaces may carry `IMPLEMENTS` edges.
    pub fn has_interfaces(self) -> bool {
        matches!(self, SubjectLanguage::Java)
    }

    /// Line-comment marker, used for dedup placeholders.
    pub fn comment_prefix(self) -> &'static str {
        match self {
            SubjectLanguage::Python => "#",
            SubjectLanguage::Java => "//",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SubjectLanguage::Python => "python",
            SubjectLanguage::Java => "java",
        }
    }
}

/// Inclusive 1-based line span. `0..0` is the sentinel for nodes without
/// source text (REPO, PACKAGE, empty files).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LineRange {
    pub start_line: u32,
    pub end_line: u32,
}

impl LineRange {
    pub const EMPTY: LineRange = LineRange {
        start_line: 0,
        end_line: 0,
    };

    pub fn new(start_line: u32, end_line: u32) -> Self {
        LineRange {
            start_line,
            end_line,
        }
    }

    pub fn is_empty(&self) -> bool {
        *self == LineRange::EMPTY
    }

    pub fn is_well_formed(&self) -> bool {
        self.is_empty() || (self.start_line >= 1 && self.start_line <= self.end_line)
    }

    pub fn contains(&self, other: &LineRange) -> bool {
        self.start_line <= other.start_line && other.end_line <= self.end_line
    }

    pub fn overlaps(&self, other: &LineRange) -> bool {
        self.start_line <= other.end_line && other.start_line <= self.end_line
    }

    pub fn len(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            (self.end_line - self.start_line + 1) as usize
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeNode {
    pub id: String,
    pub kind: NodeKind,
    pub name: String,
    pub qualified_path: String,
    pub content: String,
    pub range: LineRange,
    pub file_of: Option<String>,
}

/// Builds the stable id `<kind>:<qualified_path>[#<start_line>]`.
pub fn node_id(kind: NodeKind, qualified_path: &str, start_line: Option<u32>) -> String {
    match start_line {
        Some(line) => format!("{}:{}#{}", kind.id_prefix(), qualified_path, line),
        None => format!("{}:{}", kind.id_prefix(), qualified_path),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CodeEdge {
    pub src: String,
    pub dst: String,
    pub kind: EdgeKind,
}

impl CodeEdge {
    pub fn new(src: impl Into<String>, dst: impl Into<String>, kind: EdgeKind) -> Self {
        CodeEdge {
            src: src.into(),
            dst: dst.into(),
            kind,
        }
    }
}

impl fmt::Display for CodeEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -{}-> {}", self.src, self.kind, self.dst)
    }
}

/// Immutable code graph with adjacency indices.
///
/// Nodes are keyed by id; edges are kept sorted and deduplicated on
/// `(src, dst, kind)`. A graph may violate the structural invariants (so
/// that [`validate_graph`] can report them), but edges always refer to
/// existing nodes.
#[derive(Debug, Clone)]
pub struct CodeGraph {
    language: SubjectLanguage,
    root: String,
    nodes: BTreeMap<String, CodeNode>,
    edges: Vec<CodeEdge>,
    dangling: Vec<CodeEdge>,
    outgoing: HashMap<String, Vec<usize>>,
    incoming: HashMap<String, Vec<usize>>,
}

impl PartialEq for CodeGraph {
    fn eq(&self, other: &Self) -> bool {
        self.language == other.language
            && self.root == other.root
            && self.nodes == other.nodes
            && self.edges == other.edges
            && self.dangling == other.dangling
    }
}

impl Eq for CodeGraph {}

impl CodeGraph {
    /// Assembles a graph. Duplicate node ids are rejected; edges whose
    /// endpoints are missing are kept aside and surface as violations.
    pub fn new(
        language: SubjectLanguage,
        root: impl Into<String>,
        nodes: impl IntoIterator<Item = CodeNode>,
        edges: impl IntoIterator<Item = CodeEdge>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for node in nodes {
            if map.contains_key(&node.id) {
                return Err(Error::DuplicateNode(node.id));
            }
            map.insert(node.id.clone(), node);
        }
        let unique: BTreeSet<CodeEdge> = edges.into_iter().collect();
        let (edges, dangling): (Vec<_>, Vec<_>) = unique
            .into_iter()
            .partition(|e| map.contains_key(&e.src) && map.contains_key(&e.dst));

        let mut outgoing: HashMap<String, Vec<usize>> = HashMap::new();
        let mut incoming: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, e) in edges.iter().enumerate() {
            outgoing.entry(e.src.clone()).or_default().push(i);
            incoming.entry(e.dst.clone()).or_default().push(i);
        }
        Ok(CodeGraph {
            language,
            root: root.into(),
            nodes: map,
            edges,
            dangling,
            outgoing,
            incoming,
        })
    }

    pub fn language(&self) -> SubjectLanguage {
        self.language
    }

    pub fn root(&self) -> &str {
        &self.root
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node(&self, id: &str) -> Option<&CodeNode> {
        self.nodes.get(id)
    }

    pub fn get(&self, id: &str) -> Result<&CodeNode> {
        self.nodes
            .get(id)
            .ok_or_else(|| Error::UnknownNode(id.to_string()))
    }

    pub fn contains_node(&self, id: &str) -> bool {
        self.nodes.contains_key(id)
    }

    /// Nodes in id order.
    pub fn nodes(&self) -> impl Iterator<Item = &CodeNode> {
        self.nodes.values()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = &str> {
        self.nodes.keys().map(String::as_str)
    }

    /// Edges sorted by `(src, dst, kind)`.
    pub fn edges(&self) -> &[CodeEdge] {
        &self.edges
    }

    /// Edges whose endpoints are not in the graph.
    pub fn dangling_edges(&self) -> &[CodeEdge] {
        &self.dangling
    }

    pub fn out_edges(&self, id: &str) -> impl Iterator<Item = &CodeEdge> {
        self.outgoing
            .get(id)
            .into_iter()
            .flatten()
            .map(move |&i| &self.edges[i])
    }

    pub fn in_edges(&self, id: &str) -> impl Iterator<Item = &CodeEdge> {
        self.incoming
            .get(id)
            .into_iter()
            .flatten()
            .map(move |&i| &self.edges[i])
    }

    pub fn has_edge(&self, src: &str, dst: &str, kind: EdgeKind) -> bool {
        self.out_edges(src).any(|e| e.dst == dst && e.kind == kind)
    }

    /// The first CONTAINS parent of `id`, if any.
    pub fn parent(&self, id: &str) -> Option<&str> {
        self.in_edges(id)
            .find(|e| e.kind == EdgeKind::Contains)
            .map(|e| e.src.as_str())
    }

    /// CONTAINS children ordered by start line, then id.
    pub fn children(&self, id: &str) -> Vec<&CodeNode> {
        let mut kids: Vec<&CodeNode> = self
            .out_edges(id)
            .filter(|e| e.kind == EdgeKind::Contains)
            .filter_map(|e| self.nodes.get(&e.dst))
            .collect();
        kids.sort_by(|a, b| {
            (a.range.start_line, &a.id).cmp(&(b.range.start_line, &b.id))
        });
        kids
    }

    /// CONTAINS ancestors of `id`, nearest first. Stops on cycles.
    pub fn ancestors(&self, id: &str) -> Vec<&str> {
        let mut chain = Vec::new();
        let mut seen = BTreeSet::new();
        let mut cur = id;
        while let Some(p) = self.parent(cur) {
            if !seen.insert(p) {
                break;
            }
            chain.push(p);
            cur = p;
        }
        chain
    }

    /// Number of CONTAINS hops from the root.
    pub fn depth(&self, id: &str) -> usize {
        self.ancestors(id).len()
    }

    /// All FILE nodes sorted by qualified path.
    pub fn file_nodes(&self) -> Vec<&CodeNode> {
        self.nodes_of_kind(NodeKind::File)
    }

    pub fn nodes_of_kind(&self, kind: NodeKind) -> Vec<&CodeNode> {
        let mut out: Vec<&CodeNode> = self.nodes.values().filter(|n| n.kind == kind).collect();
        out.sort_by(|a, b| a.qualified_path.cmp(&b.qualified_path).then(a.id.cmp(&b.id)));
        out
    }

    /// Looks up a FILE or TEXTFILE by id or by repository-relative path.
    pub fn find_file(&self, id_or_path: &str) -> Option<&CodeNode> {
        if let Some(n) = self.nodes.get(id_or_path) {
            return n.kind.is_file().then_some(n);
        }
        self.nodes
            .values()
            .find(|n| n.kind.is_file() && n.qualified_path == id_or_path)
    }

    pub fn into_parts(self) -> (SubjectLanguage, String, Vec<CodeNode>, Vec<CodeEdge>) {
        let mut edges = self.edges;
        edges.extend(self.dangling);
        (
            self.language,
            self.root,
            self.nodes.into_values().collect(),
            edges,
        )
    }

    /// Copy of this graph with node contents replaced by `f`.
    pub fn map_contents(&self, mut f: impl FnMut(&CodeNode) -> String) -> CodeGraph {
        let nodes = self.nodes.values().map(|n| CodeNode {
            content: f(n),
            ..n.clone()
        });
        let edges = self.edges.iter().chain(&self.dangling).cloned();
        CodeGraph::new(self.language, self.root.clone(), nodes, edges)
            .expect("ids unchanged, so still unique")
    }
}
