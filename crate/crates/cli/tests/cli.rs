use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn tgamma(cache: Option<&Path>, args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tgamma"));
    cmd.env_remove("TGAMMA_CACHE_DIR");
    match cache {
        Some(dir) => cmd.arg("--cache-dir").arg(dir),
        None => cmd.arg("--no-cache"),
    };
    cmd.args(args).output().expect("spawn tgamma")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {:?}", out.stdout))
}

fn explain_field(out: &Output, field: &str) -> Value {
    let stderr = String::from_utf8_lossy(&out.stderr);
    let line = stderr.lines().find(|l| l.starts_with("{\"explain\"")).expect("explain line");
    serde_json::from_str::<Value>(line).unwrap()["explain"][field].clone()
}

#[test]
fn classify_example() {
    let out = tgamma(None, &["classify", "--q", "3", "--f", "t^2-t"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["m"], 2);
    assert_eq!(v["simple"], false);
    assert_eq!(v["classes"][0], serde_json::json!(["1", "t+1"]));
}

#[test]
fn bracket_example_is_bit_exact() {
    let out = tgamma(None, &["bracket", "--q", "3", "--f", "t", "--vec", "1:1,2:1"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim_end(), r#"{"is_relation":true,"sigma_plus":1}"#);
}

#[test]
fn pi_starts_at_eta_power_q() {
    for q in ["2", "3", "5"] {
        let v = json(&tgamma(None, &["pi", "--q", q, "--prec", "10"]));
        assert_eq!(v["var"], "1/eta");
        let lowest = v["terms"][0][0].as_i64().unwrap();
        assert_eq!(lowest, -q.parse::<i64>().unwrap());
    }
}

#[test]
fn cache_hit_is_byte_identical_to_uncached() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--explain", "gamma", "--q", "3", "--arg", "(t+1)/(t^2+1)", "--prec", "24"];
    let first = tgamma(Some(dir.path()), &args);
    let second = tgamma(Some(dir.path()), &args);
    let uncached = tgamma(None, &args);
    assert_eq!(explain_field(&first, "cache"), "miss");
    assert_eq!(explain_field(&second, "cache"), "hit");
    assert_eq!(explain_field(&uncached, "cache"), "disabled");
    assert!(explain_field(&second, "elapsed_us").is_u64());
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(first.stdout, uncached.stdout);
}

#[test]
fn equivalent_spellings_share_a_cache_entry() {
    let dir = tempfile::tempdir().unwrap();
    tgamma(Some(dir.path()), &["gamma", "--q", "3", "--arg", "1/t", "--prec", "8"]);
    let again = tgamma(Some(dir.path()), &["--explain", "gamma", "--q", "3", "--arg", " 1 / t ", "--prec", "8"]);
    assert_eq!(explain_field(&again, "cache"), "hit");
}

#[test]
fn corrupted_entry_is_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--explain", "pi", "--q", "3", "--prec", "12"];
    let first = tgamma(Some(dir.path()), &args);
    for entry in std::fs::read_dir(dir.path()).unwrap() {
        std::fs::write(entry.unwrap().path(), b"{\"truncated\":").unwrap();
    }
    let second = tgamma(Some(dir.path()), &args);
    assert_eq!(explain_field(&second, "cache"), "miss");
    assert_eq!(first.stdout, second.stdout);
    let third = tgamma(Some(dir.path()), &args);
    assert_eq!(explain_field(&third, "cache"), "hit");
}

#[test]
fn output_is_deterministic() {
    let args = ["certify", "--q", "2", "--f", "t", "--vec", "1:1", "--prec", "40"];
    let a = tgamma(None, &args);
    let b = tgamma(None, &args);
    assert_eq!(a.stdout, b.stdout);
    assert!(a.status.success());
    let v = json(&a);
    assert_eq!(v["stable"], true);
    assert_eq!(v["candidate"], serde_json::json!({"num": "1", "den": "eta", "var": "eta"}));
}

#[test]
fn exit_codes_and_error_json() {
    let cases: [(&[&str], i32); 5] = [
        (&["classify", "--q", "6", "--f", "t"], 2),
        (&["gamma", "--q", "3", "--arg", "1/0"], 2),
        (&["bracket", "--q", "3", "--f", "t", "--vec", "0:1"], 2),
        (&["classify", "--q", "2", "--f", "t^30"], 3),
        (&["certify", "--q", "3", "--f", "t^2-t", "--vec", "1:1,t+1:-1", "--prec", "30"], 4),
    ];
    for (args, code) in cases {
        let out = tgamma(None, args);
        assert_eq!(out.status.code(), Some(code), "{args:?}");
        let v = json(&out);
        if code != 4 {
            assert!(v["error"]["message"].is_string(), "{args:?}");
            assert!(!out.stderr.is_empty(), "{args:?}");
        }
    }
}

#[test]
fn batch_keeps_input_order() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("tasks.json");
    let mut tasks = Vec::new();
    for i in 0..12 {
        tasks.push(serde_json::json!({"command": "pi", "params": {"prec": 4 + i}}));
        tasks.push(serde_json::json!({"command": "classify", "params": {"f": "t^2+1"}}));
    }
    tasks.push(serde_json::json!({"command": "classify", "params": {"q": 6, "f": "t"}}));
    let doc = serde_json::json!({"global": {"q": 3, "cache_dir": dir.path().join("c")}, "tasks": tasks});
    std::fs::write(&manifest, doc.to_string()).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_tgamma"))
        .args(["batch", "--manifest"])
        .arg(&manifest)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "worst task code wins");
    let v = json(&out);
    let results = v["results"].as_array().unwrap();
    assert_eq!(results.len(), 25);
    for (i, r) in results.iter().enumerate() {
        assert_eq!(r["index"], i);
        if i == 24 {
            assert_eq!(r["exit_code"], 2);
            assert!(r["result"]["error"].is_object());
        } else if i % 2 == 0 {
            assert_eq!(r["command"], "pi");
            assert_eq!(r["result"]["prec"], 4 + i / 2);
        } else {
            assert_eq!(r["command"], "classify");
        }
    }
}

#[test]
fn batch_rejects_malformed_tasks_up_front() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("tasks.json");
    let doc = serde_json::json!({"tasks": [
        {"command": "pi", "params": {"q": 2}},
        {"command": "gamma", "params": {"q": 2, "nonsense": 1}}
    ]});
    std::fs::write(&manifest, doc.to_string()).unwrap();
    let out = tgamma(None, &["batch", "--manifest", manifest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let message = json(&out)["error"]["message"].as_str().unwrap().to_string();
    assert!(message.contains("task 1"), "{message}");
}
