use std::collections::BTreeMap;

use log::warn;
use serde::Serialize;

use super::backend::{cosine, HashedTrigramEmbedder, ModelBackend};
use super::rewrite::RewriteResult;
use crate::error::Result;
use crate::graph::{
    downstream_closure, induce_subgraph, neighbors, CodeGraph, Direction, EdgeKindSet,
};

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AnchorSet {
    pub extractor_anchors: Vec<String>,
    pub inferer_anchors: Vec<String>,
    pub scores: BTreeMap<String, f64>,
}

impl AnchorSet {
    pub fn is_empty(&self) -> bool {
        self.extractor_anchors.is_empty() && self.inferer_anchors.is_empty()
    }
}

fn string_matches(graph: &CodeGraph, term: &str) -> Vec<String> {
    let suffix = format!("/{term}");
    graph
        .nodes()
        .filter(|n| {
            n.name == term || n.qualified_path == term || n.qualified_path.ends_with(&suffix)
        })
        .map(|n| n.id.clone())
        .collect()
}

fn embed_all(texts: &[&str], backend: Option<&dyn ModelBackend>) -> Vec<Vec<f64>> {
    let fallback = || texts.iter().map(|t| HashedTrigramEmbedder.embed(t)).collect();
    let Some(b) = backend else {
        return fallback();
    };
    let mut out = Vec::with_capacity(texts.len());
    for t in texts {
        match b.embed(t) {
            Ok(v) if out.first().is_none_or(|f: &Vec<f64>| f.len() == v.len()) => out.push(v),
            Ok(_) => {
                warn!("embedding length changed between calls; using fallback embedder");
                return fallback();
            }
            Err(e) => {
                warn!("embedding failed ({e}); using fallback embedder");
                return fallback();
            }
        }
    }
    out
}

/// Extractor anchors match an entity or keyword exactly against a node's
/// name, its whole path or a trailing path component sequence. Inferer
/// anchors are the `top_k` nodes with content closest to the inferred
/// query, ties broken by id.
pub fn match_anchors(
    graph: &CodeGraph,
    rw: &RewriteResult,
    backend: Option<&dyn ModelBackend>,
    top_k: usize,
) -> AnchorSet {
    let mut out = AnchorSet::default();
    for term in rw.entities.iter().chain(&rw.keywords) {
        for id in string_matches(graph, term) {
            if !out.extractor_anchors.contains(&id) {
                out.scores.insert(id.clone(), 1.0);
                out.extractor_anchors.push(id);
            }
        }
    }
    out.extractor_anchors.sort();

    let nodes: Vec<_> = graph.nodes().filter(|n| !n.content.is_empty()).collect();
    if top_k == 0 || nodes.is_empty() || rw.inferred_query.is_empty() {
        return out;
    }
    let mut texts: Vec<&str> = vec![rw.inferred_query.as_str()];
    texts.extend(nodes.iter().map(|n| n.content.as_str()));
    let vecs = embed_all(&texts, backend);
    let mut ranked: Vec<(f64, &str)> = nodes
        .iter()
        .zip(&vecs[1..])
        .map(|(n, v)| (cosine(&vecs[0], v), n.id.as_str()))
        .collect();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)));
    for (score, id) in ranked.into_iter().take(top_k) {
        out.inferer_anchors.push(id.to_string());
        let slot = out.scores.entry(id.to_string()).or_insert(score);
        *slot = slot.max(score);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Extractor,
    Inferer,
    OneHop,
    Ancestor,
    FileExpansion,
}

impl Provenance {
    pub fn label(self) -> &'static str {
        match self {
            Provenance::Extractor => "extractor",
            Provenance::Inferer => "inferer",
            Provenance::OneHop => "one-hop",
            Provenance::Ancestor => "ancestor",
            Provenance::FileExpansion => "file-expansion",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalSubgraph {
    pub graph: CodeGraph,
    pub provenance: BTreeMap<String, Provenance>,
}

fn mark(prov: &mut BTreeMap<String, Provenance>, id: &str, p: Provenance) {
    let slot = prov.entry(id.to_string()).or_insert(p);
    *slot = (*slot).min(p);
}

/// Anchors plus their one-hop neighbors, every CONTAINS ancestor up to the
/// root, and the whole content of every file reached. REPO and PACKAGE
/// anchors are not expanded to neighbors.
pub fn expand_subgraph(graph: &CodeGraph, anchors: &AnchorSet) -> Result<RetrievalSubgraph> {
    let mut prov: BTreeMap<String, Provenance> = BTreeMap::new();
    if anchors.is_empty() {
        warn!("no anchors; retrieval subgraph is the root alone");
    }
    for id in &anchors.extractor_anchors {
        graph.get(id)?;
        mark(&mut prov, id, Provenance::Extractor);
    }
    for id in &anchors.inferer_anchors {
        graph.get(id)?;
        mark(&mut prov, id, Provenance::Inferer);
    }
    let seeds: Vec<String> = prov.keys().cloned().collect();
    for id in &seeds {
        if graph.get(id)?.kind.is_virtual() {
            continue;
        }
        for n in neighbors(graph, id, Direction::Both, EdgeKindSet::all())? {
            mark(&mut prov, &n, Provenance::OneHop);
        }
    }
    mark(&mut prov, graph.root(), Provenance::Ancestor);
    let reached: Vec<String> = prov.keys().cloned().collect();
    for id in &reached {
        for a in graph.ancestors(id) {
            mark(&mut prov, a, Provenance::Ancestor);
        }
    }
    let files: Vec<&str> = prov
        .keys()
        .filter_map(|id| graph.node(id))
        .filter(|n| n.kind.is_file())
        .map(|n| n.id.as_str())
        .collect();
    for id in downstream_closure(graph, files)? {
        mark(&mut prov, &id, Provenance::FileExpansion);
    }
    let sub = induce_subgraph(graph, prov.keys().map(String::as_str))?;
    Ok(RetrievalSubgraph {
        graph: sub,
        provenance: prov,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::{build_graph, PythonSyntax, SourceTree};
    use crate::graph::validate_graph;

    fn fixture() -> CodeGraph {
        let tree = SourceTree::from_files(
            "r",
            [
                ("a/x.py", "from b.y import g\n\ndef f():\n    return g()\n\ndef h():\n    return 2\n"),
                ("b/y.py", "def g():\n    return 1\n"),
                ("b/z.py", "def k():\n    return 3\n"),
            ],
        )
        .unwrap();
        build_graph(&tree, &PythonSyntax).unwrap().graph
    }

    fn anchors(ids: &[&str]) -> AnchorSet {
        AnchorSet {
            extractor_anchors: ids.iter().map(|s| s.to_string()).collect(),
            ..Default::default()
        }
    }

    #[test]
    fn function_anchor_expands_file_and_callee() {
        let g = fixture();
        let r = expand_subgraph(&g, &anchors(&["function:a/x.py/f#3"])).unwrap();
        let ids: Vec<_> = r.graph.node_ids().collect();
        assert_eq!(
            ids,
            vec![
                "file:a/x.py",
                "file:b/y.py",
                "function:a/x.py/f#3",
                "function:a/x.py/h#6",
                "function:b/y.py/g#1",
                "package:a",
                "package:b",
                "repo:",
            ]
        );
        assert_eq!(r.provenance["function:b/y.py/g#1"], Provenance::OneHop);
        assert_eq!(r.provenance["function:a/x.py/h#6"], Provenance::FileExpansion);
        assert!(validate_graph(&r.graph).is_valid());
    }

    #[test]
    fn root_anchor_is_root_only() {
        let g = fixture();
        let r = expand_subgraph(&g, &anchors(&["repo:"])).unwrap();
        assert_eq!(r.graph.node_count(), 1);
        let empty = expand_subgraph(&g, &AnchorSet::default()).unwrap();
        assert_eq!(empty.graph.node_count(), 1);
    }

    #[test]
    fn exact_name_match_and_semantic_rank() {
        let g = fixture();
        let rw = RewriteResult {
            entities: vec!["k".into()],
            keywords: vec![],
            inferred_query: "def g():\n    return 1\n".into(),
        };
        let a = match_anchors(&g, &rw, None, 2);
        assert_eq!(a.extractor_anchors, vec!["function:b/z.py/k#1"]);
        assert_eq!(a.inferer_anchors[0], "function:b/y.py/g#1");
        assert_eq!(a.inferer_anchors.len(), 2);
    }
}
