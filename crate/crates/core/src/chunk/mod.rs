//! Decoder-facing layout: fixed-size chunks per node and the graph-aware
//! attention mask built on top of them.

mod mask;
mod tokenizer;

use std::collections::{BTreeSet, HashMap};

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::CodeGraph;
use crate::linearizer::node_order;

pub use mask::{build_mask, AttentionMask};
pub use tokenizer::{ApproxTokenizer, Tokenizer};

pub const DEFAULT_CHUNK_SIZE: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChunkNode {
    pub chunk_id: String,
    pub origin: String,
    pub index: usize,
    pub text: String,
}

/// Chunks in layout order plus their adjacency relation.
#[derive(Debug, Clone)]
pub struct ChunkedGraph<'g> {
    pub chunks: Vec<ChunkNode>,
    adjacency: FixedBitSet,
    origin_graph: &'g CodeGraph,
}

impl<'g> ChunkedGraph<'g> {
    pub fn len(&self) -> usize {
        self.chunks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chunks.is_empty()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency.contains(a * self.chunks.len() + b)
    }

    pub fn origin_graph(&self) -> &'g CodeGraph {
        self.origin_graph
    }
}

/// Splits every node into chunks of at most `chunk_size` tokens. Nodes with
/// empty content keep one empty chunk. Chunks of one node are fully
/// connected; chunks of different nodes are adjacent iff the nodes share an
/// edge in either direction.
pub fn chunk_graph<'g>(
    graph: &'g CodeGraph,
    tokenizer: &dyn Tokenizer,
    chunk_size: usize,
) -> Result<ChunkedGraph<'g>> {
    if chunk_size == 0 {
        return Err(Error::contract("chunk size must be at least 1"));
    }
    let mut chunks = Vec::new();
    let mut origin_of = Vec::new();
    let mut slot: HashMap<&str, usize> = HashMap::new();
    for (pos, id) in node_order(graph).into_iter().enumerate() {
        let node = graph.get(id)?;
        let mut pieces = tokenizer.split(&node.content, chunk_size)?;
        if pieces.is_empty() {
            pieces.push("");
        }
        for (index, piece) in pieces.into_iter().enumerate() {
            if tokenizer.count(piece) > chunk_size {
                return Err(Error::Tokenizer(format!(
                    "piece {index} of {id} exceeds {chunk_size} tokens"
                )));
            }
            chunks.push(ChunkNode {
                chunk_id: format!("{id}@{index}"),
                origin: id.to_string(),
                index,
                text: piece.to_string(),
            });
            origin_of.push(pos);
        }
        slot.insert(id, pos);
    }

    let mut linked: BTreeSet<(usize, usize)> = BTreeSet::new();
    for e in graph.edges() {
        if let (Some(&a), Some(&b)) = (slot.get(e.src.as_str()), slot.get(e.dst.as_str())) {
            linked.insert((a.min(b), a.max(b)));
        }
    }
    let n = chunks.len();
    let mut adjacency = FixedBitSet::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let (u, v) = (origin_of[a], origin_of[b]);
            if u == v || linked.contains(&(u.min(v), u.max(v))) {
                adjacency.insert(a * n + b);
            }
        }
    }
    Ok(ChunkedGraph {
        chunks,
        adjacency,
        origin_graph: graph,
    })
}
