#![allow(dead_code)]

use std::path::{Path, PathBuf};

use cgm_core::builder::{build_from_dir, BuildOutput};
use cgm_core::graph::CodeGraph;

pub const REPOS: [&str; 10] = [
    "cyclic",
    "deep",
    "edge_cases",
    "large",
    "medium",
    "shapes",
    "small",
    "toolkit",
    "trainer",
    "webapp",
];

pub fn repo_dir(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures/repos")
        .join(name)
}

pub fn build(name: &str) -> BuildOutput {
    build_from_dir(&repo_dir(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn graph(name: &str) -> CodeGraph {
    build(name).graph
}

/// Every regular file under `dir`, relative path with `/` separators, in
/// sorted order. Hidden entries and `__pycache__` are skipped.
pub fn disk_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    fn walk(root: &Path, dir: &Path, out: &mut Vec<(String, Vec<u8>)>) {
        let mut entries: Vec<_> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
        entries.sort();
        for p in entries {
            let name = p.file_name().unwrap().to_string_lossy().to_string();
            if name.starts_with('.') || name == "__pycache__" {
                continue;
            }
            if p.is_dir() {
                walk(root, &p, out);
            } else {
                let rel = p.strip_prefix(root).unwrap().to_string_lossy().replace('\\', "/");
                out.push((rel, std::fs::read(&p).unwrap()));
            }
        }
    }
    let mut out = Vec::new();
    walk(dir, dir, &mut out);
    out.sort();
    out
}

/// Small xorshift generator for test inputs, independent of the crate's RNG.
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(seed.wrapping_mul(0x9E3779B97F4A7C15) | 1)
    }

    pub fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next() % n as u64) as usize
    }

    pub fn chance(&mut self, num: u64, den: u64) -> bool {
        self.next() % den < num
    }
}

/// Levenshtein distance over chars, full-matrix DP.
pub fn dp_levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in d[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = d[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = sub.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
        }
    }
    d[a.len()][b.len()]
}

/// Splits linearized text into `(path, content)` per file banner, dropping
/// the repository and package header lines and undoing the no-newline
/// marker. Written separately from the library's parser.
pub fn strip_banners(text: &str) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = Vec::new();
    let mut in_header = true;
    for line in text.split_inclusive('\n') {
        let banner = line
            .strip_prefix("# <FILE:")
            .or_else(|| line.strip_prefix("# <TEXTFILE:"))
            .and_then(|rest| rest.strip_suffix(">\n"));
        if let Some(path) = banner {
            out.push((path.to_string(), String::new()));
            in_header = false;
            continue;
        }
        if in_header {
            assert!(
                line.starts_with("# <REPO:") || line.starts_with("# <PACKAGE:"),
                "unexpected header line {line:?}"
            );
            continue;
        }
        out.last_mut().unwrap().1.push_str(line);
    }
    for (_, content) in &mut out {
        if let Some(body) = content.strip_suffix("\n\\ No newline at end of file\n") {
            *content = body.to_string();
        }
    }
    out
}

use cgm_core::graph::{CodeEdge, CodeNode, EdgeKind, LineRange, NodeKind, SubjectLanguage};

fn plain_node(kind: NodeKind, qp: &str, content: String, line: Option<u32>, file_of: Option<&str>) -> CodeNode {
    CodeNode {
        id: cgm_core::graph::node_id(kind, qp, line),
        kind,
        name: qp.rsplit('/').next().unwrap_or("").to_string(),
        qualified_path: qp.to_string(),
        content,
        range: line.map_or(LineRange::EMPTY, |l| LineRange::new(l, l)),
        file_of: file_of.map(str::to_string),
    }
}

/// Valid random graph: REPO, `files` FILE nodes, and `funcs` FUNCTION
/// nodes spread over the files, with random IMPORTS and CALLS. Node
/// contents have `0..max_chars` characters.
pub fn random_graph(rng: &mut TestRng, files: usize, funcs: usize, max_chars: usize) -> CodeGraph {
    let text = |rng: &mut TestRng| -> String {
        let n = rng.below(max_chars.max(1));
        (0..n).map(|i| (b'a' + (i % 26) as u8) as char).collect()
    };
    let mut nodes = vec![CodeNode {
        id: "repo:".into(),
        kind: NodeKind::Repo,
        name: "rand".into(),
        qualified_path: String::new(),
        content: String::new(),
        range: LineRange::EMPTY,
        file_of: None,
    }];
    let mut edges = Vec::new();
    let file_ids: Vec<String> = (0..files)
        .map(|i| {
            let n = plain_node(NodeKind::File, &format!("f{i}.py"), text(rng), None, None);
            edges.push(CodeEdge::new("repo:", n.id.clone(), EdgeKind::Contains));
            let id = n.id.clone();
            nodes.push(n);
            id
        })
        .collect();
    let mut func_ids = Vec::new();
    for k in 0..funcs {
        let f = rng.below(files);
        let qp = format!("f{f}.py/g{k}");
        let n = plain_node(NodeKind::Function, &qp, text(rng), Some(k as u32 + 1), Some(&file_ids[f]));
        edges.push(CodeEdge::new(file_ids[f].clone(), n.id.clone(), EdgeKind::Contains));
        func_ids.push(n.id.clone());
        nodes.push(n);
    }
    if !func_ids.is_empty() {
        for _ in 0..(files + funcs) {
            let a = func_ids[rng.below(func_ids.len())].clone();
            let b = func_ids[rng.below(func_ids.len())].clone();
            edges.push(CodeEdge::new(a, b, EdgeKind::Calls));
            let imp = file_ids[rng.below(files)].clone();
            let target = func_ids[rng.below(func_ids.len())].clone();
            edges.push(CodeEdge::new(imp, target, EdgeKind::Imports));
        }
    }
    CodeGraph::new(SubjectLanguage::Python, "repo:", nodes, edges).unwrap()
}

pub type PathPair = (String, String);

/// Python sources for `n` files named by a shuffled permutation, where each
/// file imports from up to three files earlier in a hidden order (acyclic)
/// or, with `cyclic`, also from some later ones. Returns the sources and the
/// planted (importer, imported) path pairs.
pub fn import_fixture(rng: &mut TestRng, n: usize, cyclic: bool) -> (Vec<PathPair>, Vec<PathPair>) {
    let mut names: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        names.swap(i, rng.below(i + 1));
    }
    let path = |i: usize| format!("m{:03}.py", names[i]);
    let module = |i: usize| format!("m{:03}", names[i]);
    let mut planted = Vec::new();
    let mut files = Vec::new();
    for i in 0..n {
        let mut src = String::new();
        let mut targets = BTreeSet::new();
        for _ in 0..3 {
            if i > 0 && rng.chance(2, 3) {
                targets.insert(rng.below(i));
            }
            if cyclic && i + 1 < n && rng.chance(1, 4) {
                targets.insert(i + 1 + rng.below(n - i - 1));
            }
        }
        for t in &targets {
            if rng.chance(1, 2) {
                src.push_str(&format!("from {} import f{}\n", module(*t), names[*t]));
            } else {
                src.push_str(&format!("import {}\n", module(*t)));
            }
            planted.push((path(i), path(*t)));
        }
        src.push_str(&format!("\n\ndef f{}():\n    return {}\n", names[i], i));
        files.push((path(i), src));
    }
    (files, planted)
}

use std::collections::BTreeSet;
