use log::warn;
use serde::Serialize;

use super::retrieve::RetrievalSubgraph;
use super::templates::{render, READER};
use crate::builder::expand_node;
use crate::chunk::{build_mask, chunk_graph, AttentionMask, ChunkNode, Tokenizer};
use crate::error::Result;
use crate::graph::NodeKind;

/// Model input for patch generation: the retrieval subgraph as node-token
/// chunks, the prompt as text tokens, and the mask joining both.
#[derive(Debug, Clone)]
pub struct ReaderInput {
    pub prompt: String,
    pub text_tokens: usize,
    pub chunks: Vec<ChunkNode>,
    pub mask: AttentionMask,
}

#[derive(Serialize)]
struct MaskJson {
    n: usize,
    node: usize,
    text: usize,
    node_rows: Vec<String>,
}

#[derive(Serialize)]
struct ReaderJson<'a> {
    prompt: &'a str,
    text_tokens: usize,
    chunks: &'a [ChunkNode],
    mask: MaskJson,
}

impl ReaderInput {
    pub fn to_json(&self) -> String {
        let doc = ReaderJson {
            prompt: &self.prompt,
            text_tokens: self.text_tokens,
            chunks: &self.chunks,
            mask: MaskJson {
                n: self.mask.size(),
                node: self.mask.node_tokens(),
                text: self.mask.text_tokens(),
                node_rows: self.mask.node_rows(),
            },
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("reader input serializes");
        s.push('\n');
        s
    }
}

/// Renders the reader prompt with the full source of `selected` files in
/// the given order. Ids that are not FILE nodes of the subgraph are dropped
/// with a warning.
pub fn assemble_reader_input(
    sub: &RetrievalSubgraph,
    selected: &[String],
    issue: &str,
    tokenizer: &dyn Tokenizer,
    chunk_size: usize,
) -> Result<ReaderInput> {
    let graph = &sub.graph;
    let mut files = String::new();
    for id in selected {
        match graph.node(id) {
            Some(n) if n.kind == NodeKind::File => {
                let content = expand_node(graph, id)?;
                files.push_str(&format!("# <FILE:{}>\n", n.qualified_path));
                files.push_str(&content);
                if !content.is_empty() && !content.ends_with('\n') {
                    files.push('\n');
                }
            }
            _ => warn!("{id} is not a source file of the retrieval subgraph; skipped"),
        }
    }
    let prompt = render(READER, &[("issue", issue.trim_end()), ("files", &files)]);
    let text_tokens = tokenizer.count(&prompt);
    let cg = chunk_graph(graph, tokenizer, chunk_size)?;
    let mask = build_mask(&cg, text_tokens);
    Ok(ReaderInput {
        prompt,
        text_tokens,
        chunks: cg.chunks,
        mask,
    })
}
