mod common;

use std::collections::BTreeMap;

use cgm_core::builder::{build_graph, PythonSyntax, SourceTree};
use cgm_core::chunk::ApproxTokenizer;
use cgm_core::graph::CodeGraph;
use cgm_core::linearizer::{
    linearize, make_issuefix_sample, make_reconstruction_sample, topo_sort_files,
    IssueFixOptions,
};

use common::{graph, import_fixture, TestRng};

fn build(files: &[(String, String)]) -> CodeGraph {
    let tree = SourceTree::from_files("imports", files.iter().cloned()).unwrap();
    build_graph(&tree, &PythonSyntax).unwrap().graph
}

fn positions(order: &[String]) -> BTreeMap<String, usize> {
    order
        .iter()
        .enumerate()
        .map(|(i, id)| (id.trim_start_matches("file:").to_string(), i))
        .collect()
}

#[test]
fn acyclic_imports_come_first() {
    let mut rng = TestRng::new(1);
    for _ in 0..50 {
        let n = 2 + rng.below(15);
        let (files, planted) = import_fixture(&mut rng, n, false);
        let order = topo_sort_files(&build(&files));
        assert_eq!(order.len(), n);
        let pos = positions(&order);
        for (importer, imported) in &planted {
            assert!(pos[imported] < pos[importer], "{imported} after {importer} in {order:?}");
        }
    }
}

#[test]
fn cyclic_imports_give_total_stable_order() {
    let mut rng = TestRng::new(2);
    for _ in 0..30 {
        let n = 3 + rng.below(12);
        let (files, _) = import_fixture(&mut rng, n, true);
        let g = build(&files);
        let order = topo_sort_files(&g);
        let mut sorted = order.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), n);
        assert_eq!(order, topo_sort_files(&build(&files)));
    }
    let g = graph("cyclic");
    assert_eq!(topo_sort_files(&g).len(), 5);
}

fn tokens(text: &str) -> usize {
    text.chars().count().div_ceil(4)
}

#[test]
fn reconstruction_respects_budget() {
    let g = graph("large");
    let tok = ApproxTokenizer::default();
    assert!(tokens(&linearize(&g).unwrap()) > 8000, "fixture must exceed the budget");
    for seed in 0..100 {
        let s = make_reconstruction_sample(&g, &tok, 8000, seed).unwrap();
        assert!(tokens(&s.target) <= 8000, "seed {seed}");
        assert_eq!(s.target, linearize(&s.input_graph).unwrap());
        assert!(s.input_graph.node_count() > 1);
    }
    let a = make_reconstruction_sample(&g, &tok, 8000, 42).unwrap().to_json_line();
    let b = make_reconstruction_sample(&g, &tok, 8000, 42).unwrap().to_json_line();
    assert_eq!(a, b);
}

#[test]
fn reconstruction_small_repo_is_whole() {
    let g = graph("small");
    let s = make_reconstruction_sample(&g, &ApproxTokenizer::default(), 8000, 3).unwrap();
    assert_eq!(s.input_graph, g);
}

#[test]
fn issuefix_noise_rates() {
    let g = graph("trainer");
    let n = 2000;
    let (mut added, mut omitted) = (0, 0);
    for seed in 0..n {
        let opts = IssueFixOptions {
            seed,
            ..Default::default()
        };
        let s = make_issuefix_sample(&g, &["trainer.py"], "crash", "patch", opts).unwrap();
        added += usize::from(s.noise_flags.added_irrelevant);
        omitted += usize::from(s.noise_flags.omitted_oracle);
        let listed = s.prompt.split("Files to modify:\n").nth(1).unwrap();
        assert_eq!(listed.contains("trainer.py\n"), !s.noise_flags.omitted_oracle);
        assert_eq!(listed.lines().count(), 1 - usize::from(s.noise_flags.omitted_oracle) + usize::from(s.noise_flags.added_irrelevant));
    }
    // 2000 draws at p = 0.1: sigma is about 13.4; allow 4 sigma
    for count in [added, omitted] {
        assert!((146..=254).contains(&count), "{count}");
    }
}
