mod common;

use std::path::Path;

use cgm_core::cli::{run, EXIT_CONTRACT, EXIT_IO, EXIT_OK, EXIT_USAGE};

use common::repo_dir;

fn cgm(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["cgm"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn built(dir: &Path, repo: &str) -> std::path::PathBuf {
    let out = dir.join(format!("{repo}.json"));
    let (code, _, err) = cgm(&["build", "--repo", s(&repo_dir(repo)), "--out", s(&out)]);
    assert_eq!(code, EXIT_OK, "{err}");
    out
}

#[test]
fn build_validate_linearize() {
    let tmp = tempfile::tempdir().unwrap();
    let g = built(tmp.path(), "small");
    let (code, out, _) = cgm(&["validate", "--graph", s(&g)]);
    assert_eq!((code, out.as_str()), (EXIT_OK, ""));
    let (code, out, _) = cgm(&["linearize", "--graph", s(&g)]);
    assert_eq!(code, EXIT_OK);
    let helpers = std::fs::read_to_string(repo_dir("small").join("helpers.py")).unwrap();
    assert!(out.contains(&format!("# <FILE:helpers.py>\n{helpers}")));
}

#[test]
fn usage_and_exit_codes() {
    assert_eq!(cgm(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(cgm(&[]).0, EXIT_USAGE);
    assert_eq!(cgm(&["--help"]).0, EXIT_OK);
    assert_eq!(cgm(&["linearize", "--graph", "/nonexistent/g.json"]).0, EXIT_IO);
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.json");
    std::fs::write(&bad, "{\"schema_version\": 1}").unwrap();
    assert_eq!(cgm(&["linearize", "--graph", s(&bad)]).0, EXIT_CONTRACT);
}

#[test]
fn invalid_graph_is_rejected_before_work() {
    let tmp = tempfile::tempdir().unwrap();
    let g = built(tmp.path(), "small");
    let mut doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&g).unwrap()).unwrap();
    doc["edges"]
        .as_array_mut()
        .unwrap()
        .retain(|e| !(e["kind"] == "CONTAINS" && e["dst"] == "file:helpers.py"));
    let broken = tmp.path().join("broken.json");
    std::fs::write(&broken, doc.to_string()).unwrap();
    let (code, out, _) = cgm(&["validate", "--graph", s(&broken)]);
    assert_eq!(code, EXIT_CONTRACT);
    assert!(out.contains("file:helpers.py"));
    let (code, out, err) = cgm(&["linearize", "--graph", s(&broken)]);
    assert_eq!(code, EXIT_CONTRACT);
    assert!(out.is_empty());
    assert!(err.contains("fails validation"));
}

#[test]
fn config_precedence() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cgm.toml");
    std::fs::write(&cfg, "chunk_size = 256\nrerank_k2 = 3\n").unwrap();
    let (code, out, _) = cgm(&["--print-config"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("chunk_size = 512"));
    let (_, out, _) = cgm(&["--config", s(&cfg), "--print-config"]);
    assert!(out.contains("chunk_size = 256") && out.contains("rerank_k2 = 3"));
    let (_, out, _) = cgm(&["--config", s(&cfg), "--chunk-size", "64", "--print-config"]);
    assert!(out.contains("chunk_size = 64") && out.contains("rerank_k2 = 3"));
    assert_eq!(cgm(&["--p-add", "2", "--print-config"]).0, EXIT_CONTRACT);
}

#[test]
fn rerank_prints_five_files() {
    let tmp = tempfile::tempdir().unwrap();
    let g = built(tmp.path(), "large");
    let issue = tmp.path().join("issue.txt");
    std::fs::write(&issue, "engine/storage/mod_07.py loses rows\n").unwrap();
    let (code, out, err) = cgm(&["rerank", "--graph", s(&g), "--issue", s(&issue)]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert_eq!(out.lines().count(), 5);
    assert_eq!(out.lines().next(), Some("file:engine/storage/mod_07.py"));
}

#[test]
fn retrieve_then_reader_input() {
    let tmp = tempfile::tempdir().unwrap();
    let g = built(tmp.path(), "trainer");
    let issue = tmp.path().join("issue.txt");
    std::fs::write(&issue, "load_checkpoint in trainer.py crashes on missing files\n").unwrap();
    let sub = tmp.path().join("sub.json");
    let (code, out, err) = cgm(&["retrieve", "--graph", s(&g), "--issue", s(&issue), "--out", s(&sub)]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(out.contains("function:trainer.py/load_checkpoint#10\textractor"));
    let files = tmp.path().join("files.txt");
    let (_, picked, _) = cgm(&["rerank", "--graph", s(&sub), "--issue", s(&issue)]);
    std::fs::write(&files, &picked).unwrap();
    let a = tmp.path().join("a.json");
    let b = tmp.path().join("b.json");
    for p in [&a, &b] {
        let (code, _, err) = cgm(&["reader-input", "--graph", s(&sub), "--issue", s(&issue), "--files", s(&files), "--out", s(p)]);
        assert_eq!(code, EXIT_OK, "{err}");
    }
    let (a, b) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(a, b);
    let doc: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert!(doc["prompt"].as_str().unwrap().contains("# <FILE:trainer.py>"));
}

#[test]
fn mask_and_simulation() {
    let tmp = tempfile::tempdir().unwrap();
    let g = built(tmp.path(), "small");
    let mask = tmp.path().join("mask.txt");
    let (code, _, _) = cgm(&["mask", "--graph", s(&g), "--text-tokens", "3", "--out", s(&mask)]);
    assert_eq!(code, EXIT_OK);
    let (code, out, _) = cgm(&["simulate-attention", "--mask", s(&mask), "--seed", "4"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.ends_with("result: PASS\n"), "{out}");
}

#[test]
fn samples_and_datasets() {
    let tmp = tempfile::tempdir().unwrap();
    let g = built(tmp.path(), "trainer");
    let (code, a, _) = cgm(&["sample", "--graph", s(&g), "--seed", "7", "--recon-budget", "200"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(a, cgm(&["sample", "--graph", s(&g), "--seed", "7", "--recon-budget", "200"]).1);
    let issues = tmp.path().join("issues.jsonl");
    std::fs::write(&issues, "{\"issue\": \"crash\", \"oracle_files\": [\"trainer.py\"], \"patch\": \"--- a\"}\n").unwrap();
    let (code, out, err) = cgm(&["dataset-gen", "--graph", s(&g), "--kind", "issuefix", "--count", "20", "--issues", s(&issues)]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert_eq!(out.lines().count(), 20);
    assert_eq!(cgm(&["dataset-gen", "--graph", s(&g), "--kind", "issuefix"]).0, EXIT_CONTRACT);
    let (_, recon, _) = cgm(&["dataset-gen", "--graph", s(&g), "--kind", "recon", "--count", "3"]);
    assert_eq!(recon.lines().count(), 3);
}

#[test]
fn eval_metrics() {
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path().join("p");
    let r = tmp.path().join("r");
    std::fs::write(&p, "kitten").unwrap();
    std::fs::write(&r, "sitting").unwrap();
    let (_, es, _) = cgm(&["eval", "--pred", s(&p), "--ref", s(&r), "--metric", "es"]);
    assert_eq!(es.trim().parse::<f64>().unwrap(), 1.0 - 3.0 / 7.0);
    let (_, em, _) = cgm(&["eval", "--pred", s(&p), "--ref", s(&r), "--metric", "em"]);
    assert_eq!(em, "0\n");
    std::fs::write(&p, "a\nc\nx\n").unwrap();
    std::fs::write(&r, "a\nb\nc\n").unwrap();
    let (_, rec, _) = cgm(&["eval", "--pred", s(&p), "--ref", s(&r), "--metric", "recall"]);
    assert!((rec.trim().parse::<f64>().unwrap() - 2.0 / 3.0).abs() < 1e-15);
}

#[test]
fn skeleton_and_rewrite() {
    let tmp = tempfile::tempdir().unwrap();
    let g = built(tmp.path(), "shapes");
    let (code, out, _) = cgm(&["skeleton", "--graph", s(&g), "--file", "geometry/round.py"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(
        out,
        "class Circle(Shape):\n    def __init__(self, r): ...\n    def area(self): ...\nclass Ellipse(Circle):\n    def __init__(self, r, q): ...\n    def area(self): ...\n"
    );
    let issue = tmp.path().join("i.txt");
    std::fs::write(&issue, "Ellipse.area is wrong for round.py\n").unwrap();
    let (code, out, _) = cgm(&["rewrite", "--graph", s(&g), "--issue", s(&issue)]);
    assert_eq!(code, EXIT_OK);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["entities"], serde_json::json!(["Ellipse", "area", "round.py"]));
}
