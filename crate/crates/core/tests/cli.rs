use std::fs;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curvecount"))
        .args(args)
        .env_remove("CURVECOUNT_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

#[test]
fn n_examples() {
    let n = |a: &str, class: &str, g: &str, beta: &str| stdout(&["n", "--a", a, "--class", class, "--g", g, "--alpha", "0", "--beta", beta]);
    assert_eq!(n("6", "0;0,-1,0,0,0,0,0", "0", "1^1"), "1\n");
    assert_eq!(n("6", "1;0,0,0,0,0,0,0", "0", "1^2"), "1\n");
    assert_eq!(n("5", "6;2,2,2,2,2,2", "4", "1^2"), "1\n");
}

#[test]
fn n_json() {
    let out = stdout(&["n", "--a", "5", "--class", "6;2,2,2,2,2,2", "--g", "0", "--alpha", "0", "--beta", "1^2", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["a"], 5);
    assert_eq!(v["genus"], 0);
    assert_eq!(v["beta"], "1^2");
    assert_eq!(v["count"].to_string(), "3240");
}

#[test]
fn gw_tables() {
    let p7 = stdout(&["gw", "p7", "--class", "6;2,2,2,2,2,2,2", "--all-genera"]);
    assert_eq!(p7, "g 0 1 2 3\nGW 576 204 26 1\n");
    let p6 = stdout(&["gw", "p6", "--class", "6;2,2,2,2,2,2", "--all-genera"]);
    assert_eq!(p6, "g 0 1 2 3 4\nGW 3240 1740 369 33 1\n");
    assert_eq!(stdout(&["gw", "p7", "--class", "1;0,0,0,0,0,0,0", "--g", "0"]), "1\n");
}

#[test]
fn single_genus_matches_table() {
    let values = ["576", "204", "26", "1"];
    for (g, v) in values.iter().enumerate() {
        let out = stdout(&["gw", "p7", "--class", "6;2,2,2,2,2,2,2", "--g", &g.to_string()]);
        assert_eq!(out.trim(), *v);
    }
}

#[test]
fn gw_json() {
    let out = stdout(&["gw", "p6", "--class", "6;2,2,2,2,2,2", "--all-genera", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["gw"].to_string(), "[3240,1740,369,33,1]");
    assert_eq!(v["target"], "p6");
}

#[test]
fn output_is_deterministic() {
    let args = ["gw", "p6", "--class", "4;1,1,1,1,1,1", "--all-genera"];
    assert_eq!(stdout(&args), stdout(&args));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&["n", "--a", "6", "--class", "1;0,0", "--g", "0", "--alpha", "0", "--beta", "1^2"]), 2);
    assert_eq!(code(&["n", "--a", "6", "--class", "1;0,0,0,0,0,0,0", "--g", "0", "--alpha", "0", "--beta", "1^x"]), 2);
    assert_eq!(code(&["n", "--a", "4", "--class", "1;0,0,0,0,0", "--g", "0", "--alpha", "0", "--beta", "1^2"]), 2);
    assert_eq!(code(&["gw", "p8", "--class", "1;0", "--g", "0"]), 2);
    let out = run(&["n", "--a", "6", "--class", "1;0,0,0,0,0,0,0", "--g", "0", "--alpha", "0", "--beta", "1^2+"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--beta"));
}

#[test]
fn cache_round_trip() {
    let dir = TempDir::new().unwrap();
    let first = dir.path().join("a6.cache");
    let second = dir.path().join("copy.cache");
    let f = first.to_str().unwrap();
    let s = second.to_str().unwrap();
    let exported = stdout(&["cache", "export", f, "--a", "6"]);
    let text = fs::read_to_string(&first).unwrap();
    assert!(text.starts_with("CHCAC v1 a=6\n"));
    let imported = stdout(&["--cache", s, "cache", "import", f]);
    assert_eq!(exported, imported);
    assert_eq!(fs::read_to_string(&second).unwrap(), text);

    let cold = stdout(&["gw", "p7", "--class", "6;2,2,2,2,2,2,2", "--all-genera"]);
    let warm = stdout(&["--cache", s, "gw", "p7", "--class", "6;2,2,2,2,2,2,2", "--all-genera"]);
    assert_eq!(cold, warm);
}

#[test]
fn damaged_caches_are_rejected() {
    let dir = TempDir::new().unwrap();
    let good = dir.path().join("good.cache");
    stdout(&["cache", "export", good.to_str().unwrap(), "--a", "6"]);
    let text = fs::read_to_string(&good).unwrap();

    let truncated = dir.path().join("truncated.cache");
    fs::write(&truncated, &text[..text.len() / 2]).unwrap();
    assert_eq!(code(&["cache", "import", truncated.to_str().unwrap()]), 2);

    let tampered = dir.path().join("tampered.cache");
    let line = text.lines().nth(1).unwrap();
    let changed = format!("{}9", line);
    fs::write(&tampered, text.replacen(line, &changed, 1)).unwrap();
    assert_eq!(code(&["cache", "import", tampered.to_str().unwrap()]), 2);

    let other = dir.path().join("a5.cache");
    stdout(&["cache", "export", other.to_str().unwrap(), "--a", "5"]);
    assert_eq!(code(&["--cache", good.to_str().unwrap(), "cache", "import", other.to_str().unwrap()]), 2);
    assert_eq!(fs::read_to_string(&good).unwrap(), text);
}

#[test]
fn verify_catches_poisoned_cache() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("poisoned.cache");
    let body = "6|1;0,0,0,0,0,0,0|0|0|1^2 2\n";
    let digest = {
        use sha2::{Digest, Sha256};
        hex::encode(Sha256::digest(body.as_bytes()))
    };
    fs::write(&path, format!("CHCAC v1 a=6\n{body}# sha256={digest}\n")).unwrap();
    let out = run(&["--cache", path.to_str().unwrap(), "verify", "--quick"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("[FAIL] 0."), "{text}");
    assert!(text.contains("6|1;0,0,0,0,0,0,0|0|0|1^2"), "{text}");
}
