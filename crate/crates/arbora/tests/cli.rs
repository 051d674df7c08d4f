use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

use arbora::corpus;
use arbora::tree::SignedTree;

fn workdir() -> PathBuf {
    let d = std::env::temp_dir().join(format!("arbora-bin-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn save(name: &str, t: &SignedTree) -> PathBuf {
    let p = workdir().join(name);
    std::fs::write(&p, t.to_json()).unwrap();
    p
}

fn arbora(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_arbora"))
        .args(args)
        .env("ARBORA_THREADS", "2")
        .output()
        .unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out) = arbora(args);
    assert_eq!(code, 0, "{:?}", args);
    serde_json::from_str(&out).unwrap()
}

#[test]
fn polytope_of_the_tripod() {
    let p = save("tripod_neg.json", &corpus::tripod_neg());
    let v = json(&["polytope", p.to_str().unwrap()]);
    assert_eq!(v["certificate"], "PASS");
    assert_eq!(v["vertex_count"], 16);
    assert_eq!(v["facet_count"], 10);
    assert_eq!(v["vertices"][0]["coords"].as_array().unwrap().len(), 4);
    assert_eq!(v["facets"][0]["rhs"], 1);
    let b = json(&["blocks", p.to_str().unwrap()]);
    assert_eq!(b.as_array().unwrap().len(), 10);
    assert_eq!(b[0], serde_json::json!(["1"]));
    let c = json(&["complex", p.to_str().unwrap()]);
    assert_eq!(c["f_vector"], serde_json::json!([1, 10, 24, 16]));
    assert_eq!(c["facets"].as_array().unwrap().len(), 16);
}

#[test]
fn minkowski_table() {
    let p = save("tripod_pos.json", &corpus::tripod_pos());
    let v = json(&["minkowski", p.to_str().unwrap(), "--check"]);
    let y = &v["y"];
    let got: Vec<i64> = ["1", "2", "1,2", "1,3", "1,2,3", "1,3,4", "1,2,3,4"]
        .iter()
        .map(|k| y[*k].as_i64().unwrap())
        .collect();
    assert_eq!(got, vec![1, -2, 3, 1, -1, 0, 0]);
    assert_eq!(v["z"]["2"], -2);
}

#[test]
fn output_is_reproducible() {
    let p = save("htree.json", &corpus::htree_diff());
    for cmd in ["complex", "polytope", "singletons", "signature-sweep"] {
        let a = arbora(&[cmd, p.to_str().unwrap()]);
        let b = arbora(&[cmd, p.to_str().unwrap()]);
        assert_eq!(a.0, 0);
        assert_eq!(a, b, "{}", cmd);
    }
}

#[test]
fn other_commands() {
    let t = save("p4.json", &corpus::path4_neg());
    let s = t.to_str().unwrap();
    let k = json(&["kappa", s, "--order", "1,2,3,4"]);
    assert_eq!(k["arcs"].as_array().unwrap().len(), 3);
    let g = json(&["flipgraph", s]);
    assert_eq!(g["spines"].as_array().unwrap().len(), 14);
    let (code, dot) = arbora(&["flipgraph", s, "--dot"]);
    assert_eq!(code, 0);
    assert!(dot.starts_with("digraph"));
    let c = json(&["congruence-check", s, "--order", "1,2,3,4"]);
    assert_eq!(c["congruences"], 1);
    let all = json(&["congruence-check", s, "--all-orders"]);
    assert_eq!(all["bases"], 24);
    let b = json(&["barycenter", s]);
    assert_eq!(b["barycenter"]["1"], "5/2");
    let h = save("htree_eq.json", &corpus::htree_eq());
    let sw = json(&["signature-sweep", h.to_str().unwrap()]);
    assert_eq!(sw["class_count"], 2);
    assert_eq!(sw["f_vectors_equal"], true);
    let a = save("tn.json", &corpus::tripod_neg());
    let p = save("tp.json", &corpus::tripod_pos());
    let iso = json(&["isometric", a.to_str().unwrap(), p.to_str().unwrap()]);
    assert_eq!(iso["isometric"], true);
    let single = json(&["singletons", a.to_str().unwrap()]);
    assert_eq!(single["count"], 12);
}

#[test]
fn exit_codes() {
    let bad = workdir().join("malformed.json");
    std::fs::write(&bad, r#"{"vertices":[{"id":"1"},{"id":"2"},{"id":"3"}],"edges":[["1","2"],["2","1"]]}"#).unwrap();
    assert_eq!(arbora(&["blocks", bad.to_str().unwrap()]).0, 1);
    let big = save("spider.json", &corpus::spider7());
    assert_eq!(arbora(&["minkowski", big.to_str().unwrap(), "--max-nu", "6"]).0, 1);
}
