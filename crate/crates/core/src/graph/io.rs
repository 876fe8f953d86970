//! JSON interchange format for code graphs.
//!
//! Top-level fields appear in the fixed order `schema_version`,
//! `subject_language`, `root`, `nodes`, `edges`. Nodes are written in id
//! order and edges in `(src, dst, kind)` order, with every field explicit
//! and text content stored verbatim.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CodeEdge, CodeGraph, CodeNode, SubjectLanguage};
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct GraphDocRef<'a> {
    schema_version: u32,
    subject_language: SubjectLanguage,
    root: &'a str,
    nodes: Vec<&'a CodeNode>,
    edges: Vec<&'a CodeEdge>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    schema_version: u32,
    subject_language: SubjectLanguage,
    root: String,
    nodes: Vec<CodeNode>,
    edges: Vec<CodeEdge>,
}

pub fn to_json(graph: &CodeGraph) -> String {
    let doc = GraphDocRef {
        schema_version: SCHEMA_VERSION,
        subject_language: graph.language(),
        root: graph.root(),
        nodes: graph.nodes().collect(),
        edges: graph.edges().iter().chain(graph.dangling_edges()).collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("graph serializes");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> Result<CodeGraph> {
    let doc: GraphDoc = serde_json::from_str(text).map_err(|source| Error::Json {
        what: "graph".into(),
        source,
    })?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(Error::SchemaVersion {
            found: doc.schema_version,
            expected: SCHEMA_VERSION,
        });
    }
    CodeGraph::new(doc.subject_language, doc.root, doc.nodes, doc.edges)
}

pub fn read_graph_file(path: &Path) -> Result<CodeGraph> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_json(&text)
}

pub fn write_graph_file(graph: &CodeGraph, path: &Path) -> Result<()> {
    fs::write(path, to_json(graph)).map_err(|e| Error::io(path, e))
}
