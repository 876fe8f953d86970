//! Issue-to-context pipeline: rewrite the issue, anchor it in the graph,
//! expand to a subgraph, pick files, and assemble the patch model's input.

mod backend;
mod reader;
mod rerank;
mod retrieve;
mod rewrite;
mod skeleton;
pub mod templates;

pub use backend::{cosine, HashedTrigramEmbedder, HttpBackend, ModelBackend, TOKEN_ENV, TRIGRAM_DIM};
pub use reader::{assemble_reader_input, ReaderInput};
pub use rerank::{rerank, RerankResult};
pub use retrieve::{expand_subgraph, match_anchors, AnchorSet, Provenance, RetrievalSubgraph};
pub use rewrite::{fallback_rewrite, issue_tokens, rewrite, RewriteResult};
pub use skeleton::{skeleton, SkeletonDoc};
