use std::collections::BTreeSet;

use super::{CodeGraph, EdgeKind, EdgeKindSet};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Out,
    In,
    Both,
}

/// Adjacent node ids of `id`, filtered by direction and edge kind, sorted
/// and deduplicated.
pub fn neighbors(
    graph: &CodeGraph,
    id: &str,
    direction: Direction,
    kinds: EdgeKindSet,
) -> Result<Vec<String>> {
    graph.get(id)?;
    let mut out = BTreeSet::new();
    if matches!(direction, Direction::Out | Direction::Both) {
        out.extend(
            graph
                .out_edges(id)
                .filter(|e| kinds.contains(e.kind))
                .map(|e| e.dst.clone()),
        );
    }
    if matches!(direction, Direction::In | Direction::Both) {
        out.extend(
            graph
                .in_edges(id)
                .filter(|e| kinds.contains(e.kind))
                .map(|e| e.src.clone()),
        );
    }
    Ok(out.into_iter().collect())
}

/// Subgraph on `ids` closed under CONTAINS ancestry (root always kept),
/// with every original edge whose endpoints both survive.
pub fn induce_subgraph<'a, I>(graph: &CodeGraph, ids: I) -> Result<CodeGraph>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut keep: BTreeSet<&str> = BTreeSet::new();
    keep.insert(graph.root());
    for id in ids {
        let node = graph.get(id)?;
        if keep.insert(node.id.as_str()) {
            for anc in graph.ancestors(id) {
                if !keep.insert(anc) {
                    break;
                }
            }
        }
    }
    let nodes = keep.iter().filter_map(|id| graph.node(id)).cloned();
    let edges = graph
        .edges()
        .iter()
        .filter(|e| keep.contains(e.src.as_str()) && keep.contains(e.dst.as_str()))
        .cloned();
    CodeGraph::new(graph.language(), graph.root(), nodes, edges)
}

/// `ids` together with all of their CONTAINS descendants.
pub fn downstream_closure<'a, I>(graph: &CodeGraph, ids: I) -> Result<BTreeSet<String>>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut seen = BTreeSet::new();
    let mut stack = Vec::new();
    for id in ids {
        graph.get(id)?;
        stack.push(id.to_string());
    }
    while let Some(id) = stack.pop() {
        if !seen.insert(id.clone()) {
            continue;
        }
        stack.extend(
            graph
                .out_edges(&id)
                .filter(|e| e.kind == EdgeKind::Contains)
                .map(|e| e.dst.clone()),
        );
    }
    Ok(seen)
}
