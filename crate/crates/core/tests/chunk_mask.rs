mod common;

use std::collections::BTreeSet;

use cgm_core::attention::{verify_locality, EmbeddingTable};
use cgm_core::chunk::{build_mask, chunk_graph, ApproxTokenizer, AttentionMask, ChunkedGraph};
use cgm_core::graph::{validate_graph, CodeGraph};

use common::{graph, random_graph, TestRng};

const CHUNK: usize = 512;

fn ceil_div(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

fn linked(g: &CodeGraph) -> BTreeSet<(String, String)> {
    g.edges()
        .iter()
        .flat_map(|e| [(e.src.clone(), e.dst.clone()), (e.dst.clone(), e.src.clone())])
        .collect()
}

/// Checks sizes, counts and adjacency of `cg` against values computed
/// from the graph directly. Returns the number of nodes checked.
fn check_chunks(g: &CodeGraph, cg: &ChunkedGraph) -> usize {
    let edges = linked(g);
    for c in &cg.chunks {
        assert!(ceil_div(c.text.chars().count(), 4) <= CHUNK, "{}", c.chunk_id);
    }
    for n in g.nodes() {
        let tokens = ceil_div(n.content.chars().count(), 4);
        let expected = ceil_div(tokens, CHUNK).max(1);
        let mine: Vec<_> = cg.chunks.iter().filter(|c| c.origin == n.id).collect();
        assert_eq!(mine.len(), expected, "{} with {tokens} tokens", n.id);
        let joined: String = mine.iter().map(|c| c.text.as_str()).collect();
        assert_eq!(joined, n.content);
    }
    for a in 0..cg.len() {
        for b in 0..cg.len() {
            let (oa, ob) = (&cg.chunks[a].origin, &cg.chunks[b].origin);
            let expected = oa == ob || edges.contains(&(oa.clone(), ob.clone()));
            assert_eq!(cg.adjacent(a, b), expected, "{} {}", cg.chunks[a].chunk_id, cg.chunks[b].chunk_id);
        }
    }
    g.node_count()
}

#[test]
fn random_sizes_chunk_exactly() {
    let tok = ApproxTokenizer::default();
    let mut rng = TestRng::new(4);
    let mut nodes = 0;
    while nodes < 1000 {
        let g = random_graph(&mut rng, 8, 12, 4 * CHUNK * 3 + 7);
        assert!(validate_graph(&g).is_valid(), "{}", validate_graph(&g));
        nodes += check_chunks(&g, &chunk_graph(&g, &tok, CHUNK).unwrap());
    }
}

#[test]
fn boundary_sizes() {
    let tok = ApproxTokenizer::default();
    for chars in [0, 1, 2047, 2048, 2049, 4096, 4097] {
        let mut rng = TestRng::new(chars as u64);
        let g = random_graph(&mut rng, 1, 0, 1);
        let g = g.map_contents(|n| if n.id == "file:f0.py" { "x".repeat(chars) } else { String::new() });
        let cg = chunk_graph(&g, &tok, CHUNK).unwrap();
        check_chunks(&g, &cg);
    }
}

#[test]
fn fixture_graphs_chunk_exactly() {
    let tok = ApproxTokenizer::default();
    for name in ["large", "webapp", "edge_cases"] {
        let g = graph(name);
        check_chunks(&g, &chunk_graph(&g, &tok, CHUNK).unwrap());
    }
}

fn expected_allows(cg: &ChunkedGraph, i: usize, j: usize) -> bool {
    let n = cg.len();
    match (i < n, j < n) {
        (true, true) => i == j || cg.adjacent(i, j),
        (true, false) => false,
        (false, true) => true,
        (false, false) => j <= i,
    }
}

#[test]
fn mask_layout_and_text_round_trip() {
    let tok = ApproxTokenizer::default();
    let mut rng = TestRng::new(9);
    for _ in 0..20 {
        let g = random_graph(&mut rng, 3, 6, 3000);
        let cg = chunk_graph(&g, &tok, CHUNK).unwrap();
        let text = rng.below(6);
        let m = build_mask(&cg, text);
        assert_eq!(m.size(), cg.len() + text);
        for i in 0..m.size() {
            for j in 0..m.size() {
                assert_eq!(m.allows(i, j), expected_allows(&cg, i, j), "({i}, {j})");
            }
        }
        assert_eq!(AttentionMask::parse(&m.to_text()).unwrap(), m);
        assert_eq!(AttentionMask::from_node_rows(&m.node_rows(), text).unwrap(), m);
    }
}

#[test]
fn locality_on_random_graphs() {
    let tok = ApproxTokenizer::default();
    let mut rng = TestRng::new(17);
    for seed in 0..10 {
        let files = 1 + rng.below(5);
        let funcs = rng.below(20 - files);
        let g = random_graph(&mut rng, files, funcs, 2600);
        let cg = chunk_graph(&g, &tok, CHUNK).unwrap();
        let m = build_mask(&cg, rng.below(5));
        let emb = EmbeddingTable::random(m.size(), 8, seed).unwrap();
        let r = verify_locality(&emb, &m).unwrap();
        assert!(r.passed, "{r}");
        assert_eq!(r.violations, 0);
        assert_eq!(r.max_forbidden_weight, 0.0);
    }
}

#[test]
fn mask_parse_rejects_bad_input() {
    assert!(AttentionMask::parse("").is_err());
    assert!(AttentionMask::parse("n=2 node=1 text=1\n10\n11\n").is_ok());
    // text row may not see a later text token
    assert!(AttentionMask::parse("n=3 node=1 text=2\n100\n111\n111\n").is_err());
    // node row may not see text
    assert!(AttentionMask::parse("n=2 node=1 text=1\n11\n11\n").is_err());
}
