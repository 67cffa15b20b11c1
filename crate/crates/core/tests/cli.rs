use std::path::Path;
use std::process::{Command, Output};

use semistream::harness::{generate, parse_stream, write_stream, Generator};
use semistream::oracle::{is_bfs_tree, is_dfs_tree};
use semistream::RootedTree;
use serde_json::Value;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semistream")).args(args).output().unwrap()
}

fn json_values(text: &[u8]) -> Vec<Value> {
    serde_json::Deserializer::from_slice(text).into_iter::<Value>().map(Result::unwrap).collect()
}

fn tree_of(result: &Value) -> RootedTree {
    let root = result["root"].as_u64().unwrap() as usize;
    let parent: Vec<Option<usize>> = serde_json::from_value(result["parent"].clone()).unwrap();
    RootedTree::from_parents(root, parent).unwrap()
}

fn write_fixture(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn bfs_rand_smoke_run() {
    let out = cli(&["run", "--alg", "bfs-rand", "--gen", "gnp:500,0.02", "--seed", "7", "--k", "66"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let values = json_values(&out.stdout);
    assert_eq!(values.len(), 2);
    let g = generate(&Generator::Gnp { n: 500, p: 0.02 }, 7).unwrap().materialize().unwrap();
    assert!(is_bfs_tree(&g, &tree_of(&values[0]["result"])));
    assert_eq!(values[1]["schema"], "meter/v1");
    assert_eq!(values[1]["algorithm"], "bfs-rand");
    assert!(values[1]["passes"].as_u64().unwrap() > 0);
}

#[test]
fn mlst_from_stream_file_reports_leaves() {
    let dir = tempfile::tempdir().unwrap();
    let stream = generate(&Generator::Gnp { n: 60, p: 0.1 }, 1).unwrap();
    let file = write_fixture(dir.path(), "g.txt", &write_stream(&stream));
    let target = dir.path().join("tree.json");
    let out = cli(&["run", "--alg", "mlst", "--stream", &file, "--epsilon", "0.9", "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let result: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    let tree = tree_of(&result["result"]);
    assert_eq!(result["result"]["leaves"].as_u64().unwrap() as usize, tree.leaf_count());
    tree.check_spans(&stream.materialize().unwrap()).unwrap();
    let meter: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("tree.json.meter.json")).unwrap()).unwrap();
    assert_eq!(meter["passes"], 1);
}

#[test]
fn malformed_stream_has_its_own_exit_code_and_no_output() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_fixture(dir.path(), "bad.txt", "n 3 model ins\n+ 0 1\n++ 1 2\n");
    let target = dir.path().join("out.json");
    let out = cli(&["run", "--alg", "bfs-det", "--p", "1", "--stream", &file, "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(6));
    assert!(out.stdout.is_empty());
    assert!(!target.exists());
    assert!(!dir.path().join("out.json.meter.json").exists());
    let out = cli(&["run", "--alg", "bfs-det", "--p", "1", "--stream", &file]);
    assert_eq!(out.status.code(), Some(6));
    assert!(out.stdout.is_empty());
}

#[test]
fn error_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let disconnected = write_fixture(dir.path(), "two.txt", "n 4 model ins\n+ 0 1\n+ 2 3\n");
    assert_eq!(cli(&["run", "--alg", "dfs-simple", "--k", "2", "--stream", &disconnected]).status.code(), Some(3));
    assert_eq!(cli(&["run", "--alg", "bfs-rand", "--gen", "path:10"]).status.code(), Some(2));
    assert_eq!(cli(&["run", "--alg", "bfs-det", "--p", "1", "--gen", "path:5", "--root", "9"]).status.code(), Some(2));
    assert_eq!(cli(&["run", "--alg", "nope", "--gen", "path:5"]).status.code(), Some(2));
    assert_eq!(cli(&["run", "--alg", "max-cut", "--gen", "path:5"]).status.code(), Some(3));
    let turnstile = cli(&["run", "--alg", "mlst", "--gen", "layered:1000,25", "--turnstile"]);
    assert_eq!(turnstile.status.code(), Some(5));
    let strict = cli(&["run", "--alg", "cert-vc", "--s", "2", "--gen", "gnp:40,0.2", "--strict-budget"]);
    assert_eq!(strict.status.code(), Some(0));
}

#[test]
fn dfs_output_has_preorder() {
    for alg in [&["dfs-simple", "--k", "3"][..], &["dfs-aa", "--k", "6", "--s", "2"][..]] {
        let mut args = vec!["run", "--alg"];
        args.extend_from_slice(alg);
        args.extend_from_slice(&["--gen", "gnp:50,0.1", "--seed", "4", "--root", "3"]);
        let out = cli(&args);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let result = &json_values(&out.stdout)[0]["result"];
        let tree = tree_of(result);
        let g = generate(&Generator::Gnp { n: 50, p: 0.1 }, 4).unwrap().materialize().unwrap();
        assert!(is_dfs_tree(&g, &tree));
        let pre: Vec<usize> = serde_json::from_value(result["preorder"].clone()).unwrap();
        assert_eq!(pre, tree.preorder());
        assert_eq!(pre[3], 0);
    }
}

#[test]
fn certificate_output_is_a_stream() {
    let out = cli(&["run", "--alg", "cert-vc", "--s", "2", "--gen", "gnp:30,0.3", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let body = &text[..text.find('{').unwrap()];
    let cert = parse_stream(body).unwrap().materialize().unwrap();
    let g = generate(&Generator::Gnp { n: 30, p: 0.3 }, 1).unwrap().materialize().unwrap();
    assert!(cert.is_subgraph_of(&g));
    assert!(cert.m() <= 2 * 29);
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for i in 0..2 {
        let target = dir.path().join(format!("r{i}.json"));
        let out = cli(&["run", "--alg", "bfs-rand", "--gen", "gnp:80,0.05", "--seed", "3", "--k", "20", "--turnstile", "--out", target.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        let read = |suffix: &str| std::fs::read(format!("{}{suffix}", target.display())).unwrap();
        texts.push((read(""), read(".dist.csv")));
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn bench_suite_ids_and_filters() {
    assert_eq!(cli(&["bench", ""]).status.code(), Some(2));
    assert_eq!(cli(&["bench", "acceptance", "--criterion", "99"]).status.code(), Some(2));
    let out = cli(&["bench", "acceptance", "--criterion", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| l.starts_with("criterion")).collect();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].contains("PASS"));
    let report: Value = serde_json::from_str(&text[text.find('{').unwrap()..]).unwrap();
    assert_eq!(report["criteria"].as_array().unwrap().len(), 1);
    assert_eq!(report["criteria"][0]["id"], 4);
}
