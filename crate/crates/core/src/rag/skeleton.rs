use serde::Serialize;

use crate::builder::expand_node;
use crate::error::{Error, Result};
use crate::graph::{CodeGraph, CodeNode, NodeKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkeletonDoc {
    pub file_id: String,
    pub text: String,
}

fn is_decl(n: &CodeNode) -> bool {
    matches!(n.kind, NodeKind::Class | NodeKind::Function)
}

/// The declaration header of a class or function: decorators skipped,
/// comments removed, continuation lines joined, whitespace collapsed, up to
/// and including the colon that opens the body.
fn header(source: &str) -> String {
    let start = source
        .lines()
        .scan(0usize, |offset, line| {
            let here = *offset;
            *offset += line.len() + 1;
            Some((here, line))
        })
        .find(|(_, line)| {
            let t = line.trim_start();
            t.starts_with("def ") || t.starts_with("class ") || t.starts_with("async ")
        })
        .map(|(off, line)| off + (line.len() - line.trim_start().len()))
        .unwrap_or(0);

    let mut out = String::new();
    let mut depth = 0i32;
    let mut quote: Option<char> = None;
    let mut chars = source[start..].chars().peekable();
    let mut pending_space = false;
    while let Some(c) = chars.next() {
        if let Some(q) = quote {
            out.push(c);
            if c == '\\' {
                if let Some(n) = chars.next() {
                    out.push(n);
                }
            } else if c == q {
                quote = None;
            }
            continue;
        }
        match c {
            '#' => {
                for n in chars.by_ref() {
                    if n == '\n' {
                        break;
                    }
                }
                pending_space = true;
                continue;
            }
            '\\' if chars.peek().is_some_and(|n| *n == '\n' || *n == '\r') => {
                pending_space = true;
                continue;
            }
            c if c.is_whitespace() => {
                pending_space = true;
                continue;
            }
            _ => {}
        }
        if pending_space {
            let after_open = out.ends_with(['(', '[']);
            let before_close = matches!(c, ')' | ']' | ',' | ':');
            if !out.is_empty() && !after_open && !before_close {
                out.push(' ');
            }
            pending_space = false;
        }
        out.push(c);
        match c {
            '"' | '\'' => quote = Some(c),
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            ':' if depth == 0 => break,
            _ => {}
        }
    }
    out
}

fn walk(graph: &CodeGraph, id: &str, level: usize, lines: &mut Vec<String>) -> Result<()> {
    for child in graph.children(id).into_iter().filter(|c| is_decl(c)) {
        let source = expand_node(graph, &child.id)?;
        let nested = graph.children(&child.id).into_iter().any(is_decl);
        let mut line = "    ".repeat(level);
        line.push_str(&header(&source));
        if !nested {
            line.push_str(" ...");
        }
        lines.push(line);
        walk(graph, &child.id, level + 1, lines)?;
    }
    Ok(())
}

/// Class and function declarations of a file in line order, indented by
/// nesting depth, without bodies or comments.
pub fn skeleton(graph: &CodeGraph, file_id: &str) -> Result<SkeletonDoc> {
    let node = graph.get(file_id)?;
    if node.kind != NodeKind::File {
        return Err(Error::contract(format!("{file_id} is not a source file")));
    }
    let mut lines = Vec::new();
    walk(graph, file_id, 0, &mut lines)?;
    let mut text = lines.join("\n");
    if !text.is_empty() {
        text.push('\n');
    }
    Ok(SkeletonDoc {
        file_id: file_id.to_string(),
        text,
    })
}
