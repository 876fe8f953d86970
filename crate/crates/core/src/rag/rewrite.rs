use std::collections::BTreeSet;
use std::sync::OnceLock;

use log::warn;
use regex::Regex;
use serde::{Deserialize, Serialize};

use super::backend::ModelBackend;
use super::templates::{render, tagged_lines, EXTRACTOR, INFERER};
use crate::error::{Error, Result};
use crate::graph::CodeGraph;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewriteResult {
    pub entities: Vec<String>,
    pub keywords: Vec<String>,
    pub inferred_query: String,
}

const STOPWORDS: &[&str] = &[
    "the", "and", "for", "with", "that", "this", "from", "when", "not", "are", "was", "but",
    "have", "has", "had", "into", "should", "would", "could", "there", "their", "which", "what",
    "where", "while", "then", "than", "also", "does", "doesn", "can", "cannot", "will", "its",
    "it's", "our", "your", "you", "they", "them", "use", "used", "using", "some", "any", "all",
    "more", "most", "only", "just", "like", "after", "before", "about", "because", "been",
    "being", "fails", "fail", "error", "bug", "issue", "please", "get", "gets", "got", "set",
];

fn token_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"[A-Za-z_][A-Za-z0-9_]*(?:[./-][A-Za-z0-9_]+)*").expect("valid token regex")
    })
}

/// Identifier-like tokens of `text`, in order of appearance.
pub fn issue_tokens(text: &str) -> Vec<&str> {
    token_re().find_iter(text).map(|m| m.as_str()).collect()
}

fn symbol_set(graph: &CodeGraph) -> BTreeSet<&str> {
    let mut out = BTreeSet::new();
    for n in graph.nodes() {
        if !n.name.is_empty() {
            out.insert(n.name.as_str());
        }
        if !n.qualified_path.is_empty() {
            out.insert(n.qualified_path.as_str());
        }
    }
    out
}

/// Deterministic rewrite without a model: entities are issue tokens (or
/// their `.`/`/` separated parts) equal to a node name or path; keywords
/// are the remaining identifier-like tokens.
pub fn fallback_rewrite(issue: &str, graph: &CodeGraph) -> RewriteResult {
    let symbols = symbol_set(graph);
    let mut entities: Vec<String> = Vec::new();
    let mut keywords: Vec<String> = Vec::new();
    let push = |list: &mut Vec<String>, s: &str| {
        if !list.iter().any(|x| x == s) {
            list.push(s.to_string());
        }
    };
    for tok in issue_tokens(issue) {
        let tok = tok.trim_end_matches('.');
        if symbols.contains(tok) {
            push(&mut entities, tok);
            continue;
        }
        let parts: Vec<&str> = tok
            .split(['.', '/'])
            .filter(|p| symbols.contains(p))
            .collect();
        if !parts.is_empty() {
            for p in parts {
                push(&mut entities, p);
            }
            continue;
        }
        let lower = tok.to_lowercase();
        if tok.len() >= 3 && !STOPWORDS.contains(&lower.as_str()) {
            push(&mut keywords, tok);
        }
    }
    keywords.retain(|k| !entities.contains(k));
    RewriteResult {
        entities,
        keywords,
        inferred_query: issue.to_string(),
    }
}

/// Extractor and Inferer prompts against `backend`; any part that fails
/// or cannot be parsed falls back to [`fallback_rewrite`].
pub fn rewrite(issue: &str, graph: &CodeGraph, backend: Option<&dyn ModelBackend>) -> Result<RewriteResult> {
    if issue.trim().is_empty() {
        return Err(Error::contract("issue text is empty"));
    }
    let fallback = fallback_rewrite(issue, graph);
    let Some(backend) = backend else {
        return Ok(fallback);
    };
    let mut out = fallback.clone();
    match backend.complete(&render(EXTRACTOR, &[("issue", issue)])) {
        Ok(text) => match (
            tagged_lines(&text, "related_code_entities"),
            tagged_lines(&text, "related_keywords"),
        ) {
            (Some(entities), Some(keywords)) => {
                out.entities = entities;
                out.keywords = keywords;
            }
            _ => warn!("extractor reply has no entity/keyword sections; using fallback"),
        },
        Err(e) => warn!("extractor failed ({e}); using fallback"),
    }
    match backend.complete(&render(INFERER, &[("issue", issue)])) {
        Ok(text) => match tagged_lines(&text, "related_queries") {
            Some(lines) if !lines.is_empty() => out.inferred_query = lines.join("\n"),
            _ => warn!("inferer reply has no query section; using fallback"),
        },
        Err(e) => warn!("inferer failed ({e}); using fallback"),
    }
    Ok(out)
}
