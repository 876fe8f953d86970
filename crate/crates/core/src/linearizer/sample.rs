use std::collections::{BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::linearize;
use crate::chunk::Tokenizer;
use crate::error::{Error, Result};
use crate::graph::{
    downstream_closure, induce_subgraph, neighbors, CodeGraph, Direction, EdgeKindSet, NodeKind,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleKind {
    Reconstruction,
    Issuefix,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoiseFlags {
    pub added_irrelevant: bool,
    pub omitted_oracle: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainingSample {
    pub kind: SampleKind,
    pub input_graph: CodeGraph,
    pub prompt: String,
    pub target: String,
    pub noise_flags: NoiseFlags,
}

#[derive(Serialize)]
struct SampleLine<'a> {
    kind: SampleKind,
    prompt: &'a str,
    target: &'a str,
    noise_flags: NoiseFlags,
    subgraph_ref: Vec<&'a str>,
}

impl TrainingSample {
    /// One JSON object on a single line, with the subgraph given by its
    /// sorted node ids.
    pub fn to_json_line(&self) -> String {
        let line = SampleLine {
            kind: self.kind,
            prompt: &self.prompt,
            target: &self.target,
            noise_flags: self.noise_flags,
            subgraph_ref: self.input_graph.node_ids().collect(),
        };
        serde_json::to_string(&line).expect("sample fields serialize")
    }
}

fn cost_of(graph: &CodeGraph, tokenizer: &dyn Tokenizer, id: &str) -> usize {
    let node = graph.node(id).expect("ids come from the graph");
    let banner = match node.kind {
        NodeKind::Repo => node.name.len() + 10,
        k if k.is_virtual() || k.is_file() => node.qualified_path.len() + 14,
        _ => 0,
    };
    tokenizer.count(&node.content) + banner.div_ceil(4)
}

/// Seeded random subgraph whose linearization fits in `budget` tokens.
/// Growth is breadth-first over all edges, in both directions, from a
/// uniformly chosen anchor; each node is taken together with its CONTAINS
/// ancestors. When the anchor's own ancestor chain is too large the anchor
/// moves up to its parent.
pub fn sample_subgraph(
    graph: &CodeGraph,
    tokenizer: &dyn Tokenizer,
    budget: usize,
    seed: u64,
) -> Result<CodeGraph> {
    let fits = |g: &CodeGraph| -> Result<bool> { Ok(tokenizer.count(&linearize(g)?) <= budget) };
    if fits(graph)? {
        return Ok(graph.clone());
    }
    let root_only = induce_subgraph(graph, [])?;
    if !fits(&root_only)? {
        return Err(Error::contract(format!(
            "budget {budget} is below the cost of the repository header"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ids: Vec<&str> = graph.node_ids().collect();
    let mut anchor = ids[rng.gen_range(0..ids.len())];
    loop {
        let chain = induce_subgraph(graph, [anchor])?;
        if fits(&chain)? {
            break;
        }
        anchor = graph.parent(anchor).expect("root alone fits");
    }

    let mut selected: BTreeSet<&str> = BTreeSet::new();
    let mut groups: Vec<Vec<&str>> = Vec::new();
    let mut first = vec![anchor];
    first.extend(graph.ancestors(anchor));
    selected.extend(first.iter().copied());
    let mut estimate: usize = first.iter().map(|id| cost_of(graph, tokenizer, id)).sum();
    groups.push(first);

    let all = EdgeKindSet::all();
    let mut queue = VecDeque::from([anchor]);
    'grow: while let Some(u) = queue.pop_front() {
        let mut next = neighbors(graph, u, Direction::Both, all)?;
        next.shuffle(&mut rng);
        for v in next {
            let v = graph.node(&v).expect("neighbors exist").id.as_str();
            if selected.contains(v) {
                continue;
            }
            let mut group = vec![v];
            group.extend(graph.ancestors(v).into_iter().filter(|a| !selected.contains(a)));
            let delta: usize = group.iter().map(|id| cost_of(graph, tokenizer, id)).sum();
            if estimate + delta > budget {
                break 'grow;
            }
            estimate += delta;
            selected.extend(group.iter().copied());
            groups.push(group);
            queue.push_back(v);
        }
    }

    loop {
        let sub = induce_subgraph(graph, selected.iter().copied())?;
        if fits(&sub)? || groups.len() == 1 {
            return Ok(sub);
        }
        for id in groups.pop().expect("more than one group") {
            selected.remove(id);
        }
    }
}

pub fn make_reconstruction_sample(
    graph: &CodeGraph,
    tokenizer: &dyn Tokenizer,
    budget: usize,
    seed: u64,
) -> Result<TrainingSample> {
    let sub = sample_subgraph(graph, tokenizer, budget, seed)?;
    let target = linearize(&sub)?;
    Ok(TrainingSample {
        kind: SampleKind::Reconstruction,
        input_graph: sub,
        prompt: String::new(),
        target,
        noise_flags: NoiseFlags::default(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IssueFixOptions {
    pub seed: u64,
    pub p_add: f64,
    pub p_omit: f64,
}

impl Default for IssueFixOptions {
    fn default() -> Self {
        IssueFixOptions {
            seed: 0,
            p_add: 0.10,
            p_omit: 0.10,
        }
    }
}

fn issue_prompt(issue: &str, files: &[&str]) -> String {
    let mut out = String::from(issue.trim_end());
    out.push_str("\n\nFiles to modify:\n");
    for f in files {
        out.push_str(f);
        out.push('\n');
    }
    out
}

/// Fine-tuning sample. The input graph covers the oracle files, their
/// contents and their one-hop neighbors; only the prompt's file list is
/// noised. Both coin flips are drawn before any choice is made, so flag
/// frequencies do not depend on the graph.
pub fn make_issuefix_sample(
    graph: &CodeGraph,
    oracle_files: &[&str],
    issue: &str,
    patch: &str,
    opts: IssueFixOptions,
) -> Result<TrainingSample> {
    if oracle_files.is_empty() {
        return Err(Error::contract("issue-fix sample needs at least one oracle file"));
    }
    for p in [opts.p_add, opts.p_omit] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::contract(format!("probability {p} outside [0, 1]")));
        }
    }
    let mut oracle: Vec<&str> = Vec::new();
    for f in oracle_files {
        let node = graph
            .find_file(f)
            .ok_or_else(|| Error::UnknownNode(f.to_string()))?;
        if !oracle.contains(&node.id.as_str()) {
            oracle.push(node.id.as_str());
        }
    }

    let mut keep = downstream_closure(graph, oracle.iter().copied())?;
    for id in &oracle {
        keep.extend(neighbors(graph, id, Direction::Both, EdgeKindSet::all())?);
    }
    let sub = induce_subgraph(graph, keep.iter().map(String::as_str))?;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let add = rng.gen_bool(opts.p_add);
    let omit = rng.gen_bool(opts.p_omit);

    let mut listed: Vec<&str> = oracle
        .iter()
        .map(|id| graph.node(id).expect("resolved above").qualified_path.as_str())
        .collect();
    let mut flags = NoiseFlags::default();
    if omit {
        let i = rng.gen_range(0..listed.len());
        listed.remove(i);
        flags.omitted_oracle = true;
    }
    if add {
        let others: Vec<&str> = graph
            .file_nodes()
            .into_iter()
            .filter(|n| !oracle.contains(&n.id.as_str()))
            .map(|n| n.qualified_path.as_str())
            .collect();
        if let Some(extra) = others.choose(&mut rng) {
            let at = rng.gen_range(0..=listed.len());
            listed.insert(at, extra);
            flags.added_irrelevant = true;
        }
    }

    Ok(TrainingSample {
        kind: SampleKind::Issuefix,
        input_graph: sub,
        prompt: issue_prompt(issue, &listed),
        target: patch.to_string(),
        noise_flags: flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::{build_graph, PythonSyntax, SourceTree};
    use crate::chunk::ApproxTokenizer;

    fn repo() -> CodeGraph {
        let mut files = Vec::new();
        for i in 0..8 {
            let next = (i + 1) % 8;
            files.push((
                format!("m{i}.py"),
                format!(
                    "from m{next} import f{next}\n\ndef f{i}():\n    return f{next}()\n\nclass K{i}:\n    def run(self):\n        return {i}\n"
                ),
            ));
        }
        let tree = SourceTree::from_files("r", files).unwrap();
        build_graph(&tree, &PythonSyntax).unwrap().graph
    }

    #[test]
    fn small_graph_is_returned_whole() {
        let g = repo();
        let t = ApproxTokenizer::default();
        assert_eq!(sample_subgraph(&g, &t, 100_000, 3).unwrap(), g);
    }

    #[test]
    fn budget_respected_and_seeded() {
        let g = repo();
        let t = ApproxTokenizer::default();
        for seed in 0..30 {
            let a = make_reconstruction_sample(&g, &t, 60, seed).unwrap();
            assert!(t.count(&a.target) <= 60);
            let b = make_reconstruction_sample(&g, &t, 60, seed).unwrap();
            assert_eq!(a, b);
            assert!(crate::graph::validate_graph(&a.input_graph).is_valid());
        }
    }

    #[test]
    fn budget_below_header_is_rejected() {
        let g = repo();
        assert!(sample_subgraph(&g, &ApproxTokenizer::default(), 1, 0).is_err());
    }

    #[test]
    fn issuefix_noise_free_prompt() {
        let g = repo();
        let opts = IssueFixOptions {
            p_add: 0.0,
            p_omit: 0.0,
            ..Default::default()
        };
        let s = make_issuefix_sample(&g, &["m1.py", "file:m3.py"], "Bug.", "diff", opts).unwrap();
        assert_eq!(s.prompt, "Bug.\n\nFiles to modify:\nm1.py\nm3.py\n");
        assert_eq!(s.noise_flags, NoiseFlags::default());
        assert!(s.input_graph.contains_node("function:m1.py/f1#3"));
        assert!(s.input_graph.contains_node("file:m2.py"));
        assert!(s.input_graph.contains_node("file:m4.py"));
        assert!(!s.input_graph.contains_node("file:m0.py"));
        assert!(!s.input_graph.contains_node("file:m6.py"));
    }

    #[test]
    fn issuefix_forced_noise() {
        let g = repo();
        let add = IssueFixOptions {
            p_add: 1.0,
            p_omit: 0.0,
            seed: 5,
        };
        let s = make_issuefix_sample(&g, &["m1.py"], "x", "p", add).unwrap();
        assert!(s.noise_flags.added_irrelevant);
        assert_eq!(s.prompt.lines().count(), 5);
        let omit = IssueFixOptions {
            p_add: 0.0,
            p_omit: 1.0,
            seed: 5,
        };
        let s = make_issuefix_sample(&g, &["m1.py"], "x", "p", omit).unwrap();
        assert!(s.noise_flags.omitted_oracle);
        assert!(s.prompt.ends_with("Files to modify:\n"));
        assert!(s.input_graph.contains_node("file:m1.py"));
    }

    #[test]
    fn issuefix_rejects_unknown_and_empty() {
        let g = repo();
        assert!(make_issuefix_sample(&g, &["nope.py"], "", "", Default::default()).is_err());
        assert!(make_issuefix_sample(&g, &[], "", "", Default::default()).is_err());
    }

    #[test]
    fn sample_json_line() {
        let g = repo();
        let s = make_issuefix_sample(&g, &["m1.py"], "x", "p", IssueFixOptions { p_add: 0.0, p_omit: 0.0, seed: 0 }).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s.to_json_line()).unwrap();
        assert_eq!(v["kind"], "issuefix");
        assert_eq!(v["noise_flags"]["omitted_oracle"], false);
        assert!(v["subgraph_ref"].as_array().unwrap().len() > 3);
    }
}
