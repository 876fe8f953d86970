use std::collections::{BTreeMap, BTreeSet};

use log::warn;
use rayon::prelude::*;
use serde::Serialize;

use super::backend::ModelBackend;
use super::rewrite::issue_tokens;
use super::skeleton::skeleton;
use super::templates::{render, tagged_lines, RERANK_STAGE1, RERANK_STAGE2};
use crate::error::{Error, Result};
use crate::graph::{CodeGraph, NodeKind};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RerankResult {
    pub stage1: Vec<String>,
    pub stage2: Vec<String>,
    pub stage1_scores: BTreeMap<String, f64>,
    pub stage2_scores: BTreeMap<String, f64>,
}

fn words(text: &str) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for tok in issue_tokens(text) {
        for part in tok.split(['.', '/', '-']) {
            if part.is_empty() {
                continue;
            }
            out.insert(part.to_lowercase());
            for sub in part.split('_').filter(|s| !s.is_empty() && *s != part) {
                out.insert(sub.to_lowercase());
            }
        }
    }
    out
}

fn path_words(path: &str) -> BTreeSet<String> {
    let stem = match path.rfind('.') {
        Some(dot) if dot > path.rfind('/').map_or(0, |s| s + 1) => &path[..dot],
        _ => path,
    };
    words(stem)
}

fn overlap(issue: &BTreeSet<String>, other: &BTreeSet<String>) -> f64 {
    issue.intersection(other).count() as f64
}

/// Highest score first, ties by path.
fn ranked(scores: &BTreeMap<String, f64>, paths: &BTreeMap<String, String>, k: usize) -> Vec<String> {
    let mut ids: Vec<&String> = scores.keys().collect();
    ids.sort_by(|a, b| {
        scores[*b]
            .total_cmp(&scores[*a])
            .then_with(|| paths[*a].cmp(&paths[*b]))
            .then_with(|| a.cmp(b))
    });
    ids.into_iter().take(k).cloned().collect()
}

fn stage1_scores(
    issue: &str,
    issue_words: &BTreeSet<String>,
    paths: &BTreeMap<String, String>,
    backend: Option<&dyn ModelBackend>,
    k1: usize,
) -> BTreeMap<String, f64> {
    let lexical: BTreeMap<String, f64> = paths
        .iter()
        .map(|(id, p)| (id.clone(), overlap(issue_words, &path_words(p))))
        .collect();
    let Some(b) = backend else {
        return lexical;
    };
    let mut sorted: Vec<&str> = paths.values().map(String::as_str).collect();
    sorted.sort();
    let listing = sorted.join("\n");
    let prompt = render(
        RERANK_STAGE1,
        &[("k", &k1.to_string()), ("issue", issue), ("files", &listing)],
    );
    let picked = match b.complete(&prompt) {
        Ok(text) => match tagged_lines(&text, "relevant_files") {
            Some(lines) => lines,
            None => {
                warn!("stage 1 reply has no file list; using lexical scores");
                return lexical;
            }
        },
        Err(e) => {
            warn!("stage 1 failed ({e}); using lexical scores");
            return lexical;
        }
    };
    let by_path: BTreeMap<&str, &str> = paths.iter().map(|(id, p)| (p.as_str(), id.as_str())).collect();
    let mut out = lexical;
    let mut rank = 0usize;
    for line in &picked {
        if let Some(id) = by_path.get(line.as_str()) {
            let slot = out.get_mut(*id).expect("candidate has a score");
            if *slot < 100.0 {
                *slot = 1000.0 - rank as f64;
                rank += 1;
            }
        }
    }
    out
}

fn parse_score(text: &str) -> Option<f64> {
    let lines = tagged_lines(text, "score")?;
    let v: f64 = lines.first()?.parse().ok()?;
    v.is_finite().then_some(v)
}

/// Two-stage file selection: stage 1 keeps the best `k1` candidates judged
/// on path alone, stage 2 keeps the best `k2` of those judged on their
/// skeletons. Without a backend both stages count lowercase words shared
/// with the issue.
pub fn rerank(
    issue: &str,
    candidates: &[String],
    graph: &CodeGraph,
    backend: Option<&dyn ModelBackend>,
    k1: usize,
    k2: usize,
) -> Result<RerankResult> {
    if candidates.is_empty() {
        return Err(Error::contract("no candidate files to rerank"));
    }
    let mut paths = BTreeMap::new();
    for id in candidates {
        let n = graph.get(id)?;
        if n.kind != NodeKind::File {
            return Err(Error::contract(format!("{id} is not a source file")));
        }
        paths.insert(id.clone(), n.qualified_path.clone());
    }
    let issue_words = words(issue);

    let s1 = stage1_scores(issue, &issue_words, &paths, backend, k1);
    let stage1 = ranked(&s1, &paths, k1);
    let stage1_scores: BTreeMap<String, f64> =
        stage1.iter().map(|id| (id.clone(), s1[id])).collect();

    let skeletons: Vec<(String, String)> = stage1
        .iter()
        .map(|id| skeleton(graph, id).map(|s| (id.clone(), s.text)))
        .collect::<Result<_>>()?;
    let lexical = |id: &str, sk: &str| {
        let mut w = words(sk);
        w.extend(path_words(&paths[id]));
        overlap(&issue_words, &w)
    };
    let scored: Vec<(String, f64)> = match backend {
        None => skeletons
            .iter()
            .map(|(id, sk)| (id.clone(), lexical(id, sk)))
            .collect(),
        Some(b) => skeletons
            .par_iter()
            .map(|(id, sk)| {
                let prompt = render(
                    RERANK_STAGE2,
                    &[("issue", issue), ("path", &paths[id]), ("skeleton", sk)],
                );
                let score = match b.complete(&prompt) {
                    Ok(text) => parse_score(&text).unwrap_or_else(|| {
                        warn!("stage 2 reply for {id} has no score; using lexical score");
                        lexical(id, sk)
                    }),
                    Err(e) => {
                        warn!("stage 2 failed for {id} ({e}); using lexical score");
                        lexical(id, sk)
                    }
                };
                (id.clone(), score)
            })
            .collect(),
    };
    let stage2_scores: BTreeMap<String, f64> = scored.into_iter().collect();
    let stage2 = ranked(&stage2_scores, &paths, k2);
    Ok(RerankResult {
        stage1,
        stage2,
        stage1_scores,
        stage2_scores,
    })
}
