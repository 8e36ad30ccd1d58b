use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const TRAIN: &str = "\
rel IMP 2 00 01 11
rel NAND2 2 00 01 10
rel F 1 0
rel OR3IMP 4 {guard}
con NAND2 moving stop
con F announcement
con IMP moving time
con IMP engineFailed announcement
con IMP trainDelayed newTime
con OR3IMP engineFailed trainDelayed doorOpen stop
hyp time doorOpen announcement
man stop
size 1
";

fn abdkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_abdkit")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn file(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

// The 4-ary guard is `engineFailed ∨ trainDelayed ∨ doorOpen → stop`: every
// tuple except those with a 1 among the first three positions and a 0 in the
// last. Bit strings are written argument-first.
fn train_file(dir: &TempDir) -> String {
    let rows: Vec<String> = (0..16u32)
        .filter(|t| t & 0b0111 == 0 || t & 0b1000 != 0)
        .map(|t| (0..4).map(|j| if t >> j & 1 == 1 { '1' } else { '0' }).collect())
        .collect();
    file(dir, "train.abd", &TRAIN.replace("{guard}", &rows.join(" ")))
}

#[test]
fn solve_train_example() {
    let dir = TempDir::new().unwrap();
    let input = train_file(&dir);
    let out = abdkit(&["solve", "-i", &input, "--variant", "eq"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["answer"], "yes");
    assert_eq!(v["witness"], serde_json::json!(["doorOpen"]));
    assert_eq!(v["engine"], "solve_by_H_enumeration");
    assert!(v["citation"].is_string());
}

#[test]
fn classify_reports_verdict_and_citation() {
    let dir = TempDir::new().unwrap();
    let input = file(&dir, "imp.abd", "rel IMP 2 00 01 11\ncon IMP x y\nhyp x\nman y\nsize 1\n");
    let v = json(&abdkit(&["classify", "-i", &input, "--variant", "eq", "--param", "E"]));
    assert_eq!(v["verdict"], "W2_complete");
    let v = json(&abdkit(&["classify", "-i", &input, "--variant", "le", "--param", "V"]));
    assert_eq!(v["verdict"], "FPT");
}

#[test]
fn plain_variant_rejects_the_size_parameter() {
    let dir = TempDir::new().unwrap();
    let input = file(&dir, "imp.abd", "rel IMP 2 00 01 11\ncon IMP x y\nhyp x\nman y\n");
    let out = abdkit(&["classify", "-i", &input, "--variant", "plain", "--param", "E"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(abdkit(&["solve", "--variant", "sometimes", "-i", "x"]).status.code(), Some(2));
    assert_eq!(abdkit(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn generate_then_solve_independent_set() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("tri.abd");
    let out_s = out.to_str().unwrap();
    let r = abdkit(&["generate", "indset", "--edges", "a-b,b-c,c-a", "-k", "1", "-o", out_s]);
    assert!(r.status.success());
    assert_eq!(json(&abdkit(&["solve", "-i", out_s, "--variant", "eq"]))["answer"], "yes");
    abdkit(&["generate", "indset", "--edges", "a-b,b-c,c-a", "-k", "2", "-o", out_s]);
    assert_eq!(json(&abdkit(&["solve", "-i", out_s, "--variant", "eq"]))["answer"], "no");
}

#[test]
fn generate_vertex_cover_from_edge_file() {
    let dir = TempDir::new().unwrap();
    let graph = file(&dir, "path.txt", "a b\nb c\nc d\n");
    let out = dir.path().join("vc.abd");
    let out_s = out.to_str().unwrap();
    for (k, want) in [(1, "no"), (2, "yes")] {
        let r = abdkit(&["generate", "vcover", "--graph", &graph, "-k", &k.to_string(), "-o", out_s]);
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
        assert_eq!(json(&abdkit(&["solve", "-i", out_s, "--variant", "le"]))["answer"], want, "k={k}");
    }
}

#[test]
fn reduce_writes_wsat_file() {
    let dir = TempDir::new().unwrap();
    let input = file(&dir, "im.abd", "rel IMP 2 00 01 11\ncon IMP a m\ncon IMP b m\nhyp a b\nman m\nsize 1\n");
    let target = dir.path().join("im.wsat");
    let v = json(&abdkit(&["reduce", "-i", &input, "--target", "wsat", "-o", target.to_str().unwrap()]));
    assert_eq!(v["reduction"], "reduce_im_eq_to_wsat");
    assert_eq!(v["k"], 1);
    let text = fs::read_to_string(Path::new(&target)).unwrap();
    assert!(text.starts_with("p wsat "), "{text}");
    assert!(text.lines().next().unwrap().ends_with(" 1 eq"));
}

#[test]
fn verify_reports_agreement() {
    let dir = TempDir::new().unwrap();
    let input = train_file(&dir);
    let out = abdkit(&["verify", "-i", &input, "--variant", "le"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["all_agree"], true);
    assert!(!v["outcomes"].as_array().unwrap().is_empty());
}
