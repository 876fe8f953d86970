//! Graph-to-text: file ordering, linearization of (sub)graphs and the
//! training samples built from them.

mod sample;

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::builder::expand_node;
use crate::error::Result;
use crate::graph::{CodeGraph, EdgeKind, NodeKind};

pub use sample::{
    make_issuefix_sample, make_reconstruction_sample, sample_subgraph, IssueFixOptions,
    NoiseFlags, SampleKind, TrainingSample,
};

pub const NO_NEWLINE_MARKER: &str = "\\ No newline at end of file\n";

/// FILE ids with every imported file before its importers. Import cycles
/// are broken by repeatedly dropping, inside each strongly connected
/// component, the edge with the greatest source path (then destination
/// path). Ready files are taken in path order.
pub fn topo_sort_files(graph: &CodeGraph) -> Vec<String> {
    let files = graph.file_nodes();
    let index: BTreeMap<&str, usize> = files
        .iter()
        .enumerate()
        .map(|(i, f)| (f.id.as_str(), i))
        .collect();
    let file_index = |id: &str| -> Option<usize> {
        let node = graph.node(id)?;
        match node.kind {
            NodeKind::File => index.get(id).copied(),
            _ => node.file_of.as_deref().and_then(|f| index.get(f).copied()),
        }
    };

    // (importer, imported)
    let mut deps: BTreeSet<(usize, usize)> = BTreeSet::new();
    for e in graph.edges().iter().filter(|e| e.kind == EdgeKind::Imports) {
        if let (Some(a), Some(b)) = (file_index(&e.src), file_index(&e.dst)) {
            if a != b {
                deps.insert((a, b));
            }
        }
    }

    loop {
        let mut g: DiGraph<usize, ()> = DiGraph::new();
        let nodes: Vec<_> = (0..files.len()).map(|i| g.add_node(i)).collect();
        for &(a, b) in &deps {
            g.add_edge(nodes[a], nodes[b], ());
        }
        let mut dropped = false;
        for scc in tarjan_scc(&g) {
            if scc.len() < 2 {
                continue;
            }
            let members: BTreeSet<usize> = scc.iter().map(|n| g[*n]).collect();
            let worst = deps
                .iter()
                .filter(|(a, b)| members.contains(a) && members.contains(b))
                .max_by(|x, y| {
                    let key = |&(a, b): &(usize, usize)| {
                        (files[a].qualified_path.as_str(), files[b].qualified_path.as_str())
                    };
                    key(x).cmp(&key(y))
                })
                .copied();
            if let Some(edge) = worst {
                deps.remove(&edge);
                dropped = true;
            }
        }
        if !dropped {
            break;
        }
    }

    let mut pending = vec![0usize; files.len()];
    let mut importers: Vec<Vec<usize>> = vec![Vec::new(); files.len()];
    for &(a, b) in &deps {
        pending[a] += 1;
        importers[b].push(a);
    }
    let key = |i: usize| (files[i].qualified_path.as_str(), files[i].id.as_str(), i);
    let mut ready: BinaryHeap<Reverse<(&str, &str, usize)>> = (0..files.len())
        .filter(|&i| pending[i] == 0)
        .map(|i| Reverse(key(i)))
        .collect();
    let mut order = Vec::with_capacity(files.len());
    while let Some(Reverse((_, _, i))) = ready.pop() {
        order.push(files[i].id.clone());
        for &a in &importers[i] {
            pending[a] -= 1;
            if pending[a] == 0 {
                ready.push(Reverse(key(a)));
            }
        }
    }
    order
}

/// Layout order shared by chunking and linearization: REPO, PACKAGEs by
/// path, each FILE (in topological order) followed by its in-file nodes by
/// start line, then TEXTFILEs by path.
pub fn node_order(graph: &CodeGraph) -> Vec<&str> {
    let mut out: Vec<&str> = Vec::with_capacity(graph.node_count());
    out.extend(graph.nodes_of_kind(NodeKind::Repo).iter().map(|n| n.id.as_str()));
    out.extend(graph.nodes_of_kind(NodeKind::Package).iter().map(|n| n.id.as_str()));

    let mut in_file: BTreeMap<&str, Vec<(u32, usize, &str)>> = BTreeMap::new();
    for n in graph.nodes().filter(|n| n.kind.is_in_file()) {
        if let Some(f) = n.file_of.as_deref() {
            in_file
                .entry(f)
                .or_default()
                .push((n.range.start_line, graph.depth(&n.id), n.id.as_str()));
        }
    }
    for file in topo_sort_files(graph) {
        let file = graph.node(&file).expect("sorted ids come from the graph");
        out.push(file.id.as_str());
        if let Some(mut inner) = in_file.remove(file.id.as_str()) {
            inner.sort();
            out.extend(inner.into_iter().map(|(_, _, id)| id));
        }
    }
    out.extend(graph.nodes_of_kind(NodeKind::TextFile).iter().map(|n| n.id.as_str()));
    out
}

fn banner(prefix: &str, kind: NodeKind, path: &str) -> String {
    format!("{prefix} <{}:{}>\n", kind.label(), path)
}

fn push_body(out: &mut String, body: &str) {
    out.push_str(body);
    if !body.is_empty() && !body.ends_with('\n') {
        out.push('\n');
        out.push_str(NO_NEWLINE_MARKER);
    }
}

/// Text form of a (sub)graph: a header naming the repository and its
/// packages, then one block per file. Placeholders of children that are
/// in the graph are expanded; the others stay as they are.
pub fn linearize(graph: &CodeGraph) -> Result<String> {
    let prefix = graph.language().comment_prefix();
    let mut out = String::new();
    for repo in graph.nodes_of_kind(NodeKind::Repo) {
        out.push_str(&banner(prefix, NodeKind::Repo, &repo.name));
    }
    for pkg in graph.nodes_of_kind(NodeKind::Package) {
        out.push_str(&banner(prefix, NodeKind::Package, &pkg.qualified_path));
    }
    for id in topo_sort_files(graph) {
        let file = graph.get(&id)?;
        out.push_str(&banner(prefix, NodeKind::File, &file.qualified_path));
        push_body(&mut out, &expand_node(graph, &id)?);
    }
    for text in graph.nodes_of_kind(NodeKind::TextFile) {
        out.push_str(&banner(prefix, NodeKind::TextFile, &text.qualified_path));
        push_body(&mut out, &text.content);
    }
    Ok(out)
}

/// One file block of linearized text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileBlock {
    pub kind: NodeKind,
    pub path: String,
    pub content: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Linearized {
    pub repo: Option<String>,
    pub packages: Vec<String>,
    pub files: Vec<FileBlock>,
}

fn parse_banner<'a>(prefix: &str, line: &'a str) -> Option<(&'a str, &'a str)> {
    let body = line.strip_suffix('\n')?.strip_prefix(prefix)?.strip_prefix(" <")?;
    let body = body.strip_suffix('>')?;
    body.split_once(':')
}

/// Splits linearized text back into header and file blocks. Lines in file
/// bodies that look exactly like a banner are ambiguous and end the block.
pub fn parse_linearized(prefix: &str, text: &str) -> Linearized {
    let mut out = Linearized::default();
    let mut current: Option<FileBlock> = None;
    let finish = |block: Option<FileBlock>, out: &mut Linearized| {
        if let Some(mut b) = block {
            if let Some(stripped) = b.content.strip_suffix(NO_NEWLINE_MARKER) {
                b.content = stripped.strip_suffix('\n').unwrap_or(stripped).to_string();
            }
            out.files.push(b);
        }
    };
    for line in text.split_inclusive('\n') {
        let parsed = parse_banner(prefix, line);
        match parsed {
            Some(("FILE", path)) | Some(("TEXTFILE", path)) => {
                finish(current.take(), &mut out);
                let kind = if line.contains("<FILE:") {
                    NodeKind::File
                } else {
                    NodeKind::TextFile
                };
                current = Some(FileBlock {
                    kind,
                    path: path.to_string(),
                    content: String::new(),
                });
            }
            Some(("REPO", name)) if current.is_none() => out.repo = Some(name.to_string()),
            Some(("PACKAGE", path)) if current.is_none() => out.packages.push(path.to_string()),
            _ => {
                if let Some(block) = current.as_mut() {
                    block.content.push_str(line);
                }
            }
        }
    }
    finish(current.take(), &mut out);
    out
}
