use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hkqk"))
}

fn write(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hkqk-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

#[test]
fn verify_cmap_json_is_deterministic() {
    let cfg = write("cmap.json", r#"{"model": "cmap", "lambda2": 4, "mode": "sampled", "samples": 5, "seed": 3}"#);
    let path = cfg.to_str().unwrap();
    let a = run(&["verify", path, "--format", "json"]);
    let b = run(&["verify", path, "--format", "json"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["summary"]["model"], "cmap");
    assert_eq!(v["entries"][0]["mode"], "sampled(n=5, seed=3)");
}

#[test]
fn flags_override_the_file_and_text_mirrors_json() {
    let cfg = write("flat.json", r#"{"model": "flat", "p": 2, "q": 0, "lambdas": [1, 2], "c": 1}"#);
    let path = cfg.to_str().unwrap();
    let out = write("flat.txt", "");
    let o = run(&["verify", path, "--mode", "sampled", "--samples", "3", "--seed", "9", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("verdict: pass"));
    assert!(text.contains("(sampled(n=3, seed=9))"));
    let json = run(&["verify", path, "--mode", "sampled", "--samples", "3", "--seed", "9", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    for e in v["entries"].as_array().unwrap() {
        assert!(text.contains(&format!("{} ({})", e["name"].as_str().unwrap(), e["mode"].as_str().unwrap())));
    }
}

#[test]
fn exit_codes() {
    let bad = write("bad.json", "{ not json");
    assert_eq!(run(&["verify", bad.to_str().unwrap()]).status.code(), Some(2));
    let invalid = write("invalid.json", r#"{"model": "flat", "p": 2, "q": 0, "lambdas": [1]}"#);
    assert_eq!(run(&["verify", invalid.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["verify", "/nonexistent/config.json"]).status.code(), Some(2));
    let fail = write("l1.json", r#"{"model": "cmap", "lambda2": 1}"#);
    assert_eq!(run(&["verify", fail.to_str().unwrap()]).status.code(), Some(1));
    let null = write("null.json", r#"{"model": "flat", "p": 1, "q": 1, "lambdas": [1, 1]}"#);
    assert_eq!(run(&["verify", null.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn list_checks_and_dump_model() {
    let o = run(&["list-checks"]);
    assert_eq!(o.status.code(), Some(0));
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(s.lines().any(|l| l.starts_with("thm_canonical_gN")));
    let o = run(&["list-checks", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), hkqk::catalog::CHECKS.len());

    let cfg = write("dump.json", r#"{"model": "flat", "p": 1, "q": 1, "lambdas": [1, 2]}"#);
    let o = run(&["dump-model", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let chart = hkqk::Chart::from_json(std::str::from_utf8(&o.stdout).unwrap()).unwrap();
    assert_eq!(chart.dim(), 8);
}
