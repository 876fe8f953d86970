//! Parent-text deduplication. Each child's lines are cut out of its
//! parent's content and replaced by a one-line placeholder comment, so
//! every source line is stored in exactly one node.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::{CodeGraph, CodeNode};

const MARK_OPEN: &str = " <CHILD:";

/// `<indent><comment> <CHILD:id><terminator>`
pub fn placeholder_line(comment_prefix: &str, indent: &str, id: &str, terminator: &str) -> String {
    format!("{indent}{comment_prefix}{MARK_OPEN}{id}>{terminator}")
}

/// The child id named by a placeholder line, if `line` is one.
pub fn parse_placeholder<'a>(comment_prefix: &str, line: &'a str) -> Option<&'a str> {
    let body = line
        .trim_end_matches('\n')
        .trim_end_matches('\r')
        .trim_start_matches([' ', '\t', '\x0c']);
    let id = body
        .strip_prefix(comment_prefix)?
        .strip_prefix(MARK_OPEN)?
        .strip_suffix('>')?;
    (!id.is_empty() && !id.contains('>')).then_some(id)
}

fn leading_ws(line: &str) -> &str {
    let n = line.len() - line.trim_start_matches([' ', '\t', '\x0c']).len();
    &line[..n]
}

fn terminator(line: &str) -> &'static str {
    if line.ends_with("\r\n") {
        "\r\n"
    } else if line.ends_with('\n') {
        "\n"
    } else if line.ends_with('\r') {
        "\r"
    } else {
        ""
    }
}

fn contains_children<'g>(graph: &'g CodeGraph, id: &str) -> Vec<&'g CodeNode> {
    graph
        .children(id)
        .into_iter()
        .filter(|c| c.kind.is_in_file())
        .collect()
}

/// Full source text of `id`: its content with every placeholder that names
/// one of its CONTAINS children replaced by that child's expanded text.
pub fn expand_node(graph: &CodeGraph, id: &str) -> Result<String> {
    let mut guard = BTreeSet::new();
    expand_inner(graph, id, &mut guard)
}

fn expand_inner<'g>(graph: &'g CodeGraph, id: &'g str, guard: &mut BTreeSet<&'g str>) -> Result<String> {
    let node = graph.get(id)?;
    if !guard.insert(node.id.as_str()) {
        return Err(Error::Malformed(format!("containment cycle through {id}")));
    }
    let kids: BTreeMap<&str, &CodeNode> = contains_children(graph, id)
        .into_iter()
        .map(|c| (c.id.as_str(), c))
        .collect();
    let prefix = graph.language().comment_prefix();
    let mut out = String::with_capacity(node.content.len());
    for line in node.content.split_inclusive('\n') {
        match parse_placeholder(prefix, line).and_then(|cid| kids.get(cid)) {
            Some(child) => out.push_str(&expand_inner(graph, &child.id, guard)?),
            None => out.push_str(line),
        }
    }
    guard.remove(node.id.as_str());
    Ok(out)
}

/// Replaces each child's line span in its parent's content by a
/// placeholder. Works on raw or already deduplicated graphs: contents are
/// expanded first whenever their line count no longer matches the range.
pub fn dedup_parent_text(graph: &CodeGraph) -> Result<CodeGraph> {
    let prefix = graph.language().comment_prefix();
    let mut replaced: BTreeMap<String, String> = BTreeMap::new();
    for node in graph.nodes() {
        let kids = contains_children(graph, &node.id);
        if kids.is_empty() || node.kind.is_virtual() {
            continue;
        }
        let full = if node.content.split_inclusive('\n').count() == node.range.len() {
            node.content.clone()
        } else {
            expand_node(graph, &node.id)?
        };
        let lines: Vec<&str> = full.split_inclusive('\n').collect();
        if lines.len() != node.range.len() {
            return Err(Error::Malformed(format!(
                "{} has {} lines but range {}..{}",
                node.id,
                lines.len(),
                node.range.start_line,
                node.range.end_line
            )));
        }
        let base = node.range.start_line;
        let mut out = String::with_capacity(full.len());
        let mut next = 0usize;
        for kid in kids {
            let r = kid.range;
            if r.is_empty() || r.start_line < base || !node.range.contains(&r) {
                return Err(Error::Malformed(format!("{} lies outside {}", kid.id, node.id)));
            }
            let s = (r.start_line - base) as usize;
            let e = (r.end_line - base) as usize;
            if s < next {
                return Err(Error::Malformed(format!("{} overlaps a sibling", kid.id)));
            }
            out.extend(lines[next..s].iter().copied());
            out.push_str(&placeholder_line(
                prefix,
                leading_ws(lines[s]),
                &kid.id,
                terminator(lines[e]),
            ));
            next = e + 1;
        }
        out.extend(lines[next..].iter().copied());
        replaced.insert(node.id.clone(), out);
    }
    Ok(graph.map_contents(|n| replaced.get(&n.id).cloned().unwrap_or_else(|| n.content.clone())))
}
