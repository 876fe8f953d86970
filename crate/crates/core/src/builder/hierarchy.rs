use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use super::syntax::{Item, ItemKind, ModuleOutline, SyntaxError, SyntaxProvider};
use super::{SourceFile, SourceTree, Warning, WarningKind};
use crate::error::Result;
use crate::graph::{node_id, CodeEdge, CodeGraph, CodeNode, EdgeKind, LineRange, NodeKind};

/// Hierarchy-only graph plus the parsed outlines reference resolution needs.
#[derive(Debug, Clone)]
pub struct Hierarchy {
    pub graph: CodeGraph,
    /// FILE id -> (path, outline)
    pub outlines: BTreeMap<String, (String, ModuleOutline)>,
    pub warnings: Vec<Warning>,
}

pub const ROOT_ID: &str = "repo:";

pub(crate) fn item_node_kind(kind: ItemKind) -> NodeKind {
    match kind {
        ItemKind::Class => NodeKind::Class,
        ItemKind::Function => NodeKind::Function,
        ItemKind::Attribute => NodeKind::Attribute,
    }
}

pub(crate) fn item_id(parent_qp: &str, item: &Item) -> (String, String) {
    let qp = format!("{parent_qp}/{}", item.name);
    let id = node_id(item_node_kind(item.kind), &qp, Some(item.range.start_line));
    (id, qp)
}

fn parent_dir_id(path: &str) -> String {
    match path.rsplit_once('/') {
        Some((dir, _)) => node_id(NodeKind::Package, dir, None),
        None => ROOT_ID.to_string(),
    }
}

fn base_name(path: &str) -> &str {
    path.rsplit('/').next().unwrap_or(path)
}

enum Parsed {
    Source(String, ModuleOutline),
    Text(String),
    Broken(String, SyntaxError),
    Binary,
}

fn parse_file(file: &SourceFile, provider: &dyn SyntaxProvider) -> Parsed {
    let text = match std::str::from_utf8(&file.bytes) {
        Ok(t) => t.to_string(),
        Err(_) => return Parsed::Binary,
    };
    if !provider.handles(&file.path) {
        return Parsed::Text(text);
    }
    match provider.parse(&text) {
        Ok(outline) => Parsed::Source(text, outline),
        Err(e) => Parsed::Broken(text, e),
    }
}

struct Assembler {
    nodes: Vec<CodeNode>,
    edges: Vec<CodeEdge>,
    ids: BTreeSet<String>,
    warnings: Vec<Warning>,
}

impl Assembler {
    fn add(&mut self, parent: &str, node: CodeNode) {
        self.edges
            .push(CodeEdge::new(parent, node.id.clone(), EdgeKind::Contains));
        self.ids.insert(node.id.clone());
        self.nodes.push(node);
    }

    #[allow(clippy::too_many_arguments)]
    fn add_items(
        &mut self,
        path: &str,
        file_id: &str,
        parent_id: &str,
        parent_qp: &str,
        parent_range: LineRange,
        items: &[Item],
        lines: &[&str],
    ) {
        let mut sorted: Vec<&Item> = items.iter().collect();
        sorted.sort_by_key(|i| (i.range.start_line, i.range.end_line));
        let mut last_end = 0u32;
        for item in sorted {
            let (id, qp) = item_id(parent_qp, item);
            let r = item.range;
            let fits = r.is_well_formed()
                && !r.is_empty()
                && parent_range.contains(&r)
                && r.start_line > last_end
                && (r.end_line as usize) <= lines.len();
            if !fits || self.ids.contains(&id) {
                self.warnings.push(Warning {
                    path: path.to_string(),
                    line: r.start_line,
                    kind: WarningKind::SkippedItem,
                    message: format!("`{}` overlaps a sibling or leaves its parent", item.name),
                });
                continue;
            }
            last_end = r.end_line;
            let content = lines[(r.start_line - 1) as usize..r.end_line as usize].concat();
            self.add(
                parent_id,
                CodeNode {
                    id: id.clone(),
                    kind: item_node_kind(item.kind),
                    name: item.name.clone(),
                    qualified_path: qp.clone(),
                    content,
                    range: r,
                    file_of: Some(file_id.to_string()),
                },
            );
            self.add_items(path, file_id, &id, &qp, r, &item.children, lines);
        }
    }
}

/// Builds the CONTAINS tree: REPO, one PACKAGE per directory, FILE per
/// source file of the provider's language, TEXTFILE for everything else,
/// then CLASS/FUNCTION/ATTRIBUTE nodes from each file's outline. Files that
/// fail to parse are demoted to TEXTFILE with a warning.
pub fn build_hierarchy(tree: &SourceTree, provider: &dyn SyntaxProvider) -> Result<Hierarchy> {
    let parsed: Vec<Parsed> = tree
        .files()
        .par_iter()
        .map(|f| parse_file(f, provider))
        .collect();

    let mut asm = Assembler {
        nodes: Vec::new(),
        edges: Vec::new(),
        ids: BTreeSet::new(),
        warnings: Vec::new(),
    };
    asm.ids.insert(ROOT_ID.to_string());
    asm.nodes.push(CodeNode {
        id: ROOT_ID.to_string(),
        kind: NodeKind::Repo,
        name: tree.name().to_string(),
        qualified_path: String::new(),
        content: String::new(),
        range: LineRange::EMPTY,
        file_of: None,
    });

    for dir in tree.dirs() {
        asm.add(
            &parent_dir_id(dir),
            CodeNode {
                id: node_id(NodeKind::Package, dir, None),
                kind: NodeKind::Package,
                name: base_name(dir).to_string(),
                qualified_path: dir.clone(),
                content: String::new(),
                range: LineRange::EMPTY,
                file_of: None,
            },
        );
    }

    let mut outlines = BTreeMap::new();
    for (file, parsed) in tree.files().iter().zip(parsed) {
        let path = file.path.as_str();
        let parent = parent_dir_id(path);
        let (kind, text, outline) = match parsed {
            Parsed::Source(text, outline) => (NodeKind::File, text, Some(outline)),
            Parsed::Text(text) => (NodeKind::TextFile, text, None),
            Parsed::Broken(text, err) => {
                asm.warnings.push(Warning {
                    path: path.to_string(),
                    line: err.line,
                    kind: WarningKind::ParseError,
                    message: format!("{}; kept as text file", err.message),
                });
                (NodeKind::TextFile, text, None)
            }
            Parsed::Binary => {
                asm.warnings.push(Warning {
                    path: path.to_string(),
                    line: 0,
                    kind: WarningKind::NonUtf8,
                    message: "content is not UTF-8; stored empty".into(),
                });
                (NodeKind::TextFile, String::new(), None)
            }
        };
        let lines: Vec<&str> = text.split_inclusive('\n').collect();
        let range = if lines.is_empty() {
            LineRange::EMPTY
        } else {
            LineRange::new(1, lines.len() as u32)
        };
        let id = node_id(kind, path, None);
        asm.add(
            &parent,
            CodeNode {
                id: id.clone(),
                kind,
                name: base_name(path).to_string(),
                qualified_path: path.to_string(),
                content: text.clone(),
                range,
                file_of: None,
            },
        );
        if let Some(outline) = outline {
            asm.add_items(path, &id, &id, path, range, &outline.items, &lines);
            outlines.insert(id, (path.to_string(), outline));
        }
    }

    let graph = CodeGraph::new(provider.language(), ROOT_ID, asm.nodes, asm.edges)?;
    Ok(Hierarchy {
        graph,
        outlines,
        warnings: asm.warnings,
    })
}
