use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::atomic::{AtomicUsize, Ordering};

use serde_json::Value;

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}.problem", env!("CARGO_MANIFEST_DIR"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asymod")).args(args).output().unwrap()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    let out = run(&all);
    let v: Value = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{args:?}: {e}\n{}", String::from_utf8_lossy(&out.stderr)));
    (out.status.code().unwrap(), v)
}

/// Feeds every embedded problem back through `check`.
fn witnesses_recheck(report: &Value) -> usize {
    static NEXT: AtomicUsize = AtomicUsize::new(0);
    let mut n = 0;
    for w in report["witnesses"].as_array().unwrap() {
        let Some(problem) = w["problem"].as_str() else { continue };
        let path = scratch(&format!("witness-{}.problem", NEXT.fetch_add(1, Ordering::Relaxed)));
        std::fs::write(&path, problem).unwrap();
        let (code, v) = json(&["check", "--problem", path.to_str().unwrap()]);
        assert_eq!(code, 0, "{problem}\n{v}");
        n += 1;
    }
    n
}

#[test]
fn usage_errors_exit_3() {
    assert_eq!(run(&[]).status.code(), Some(3));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(run(&["check"]).status.code(), Some(3));
    assert_eq!(run(&["prove-atomic", "--problem", &fixture("failure"), "--mode", "both"]).status.code(), Some(3));
    assert_eq!(run(&["check", "--problem", "/nonexistent/x.problem"]).status.code(), Some(3));

    let bad = scratch("bad.problem");
    std::fs::write(&bad, "sig a/0; pred P/1;\nsequent P(x |-;\n").unwrap();
    let out = run(&["check", "--problem", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("2:"), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn reports_have_the_documented_fields() {
    let (code, v) = json(&["check", "--problem", &fixture("arithmetic"), "--witnesses"]);
    assert_eq!(code, 0);
    for field in ["schema", "command", "input", "verdict", "outcome", "exit_code", "complete", "budget", "summary", "witnesses", "details"] {
        assert!(v.get(field).is_some(), "missing {field}: {v}");
    }
    assert_eq!(v["schema"], "asymod-report/1");
    assert_eq!(v["command"], "check");
    assert_eq!(v["verdict"], "valid");
    assert_eq!(v["exit_code"], 0);
    assert_eq!(v["input"]["sha256"].as_str().unwrap().len(), 64);
    assert!(v["witnesses"].as_array().unwrap().iter().any(|w| w["derivation"].is_string()));
    assert_eq!(v["details"]["proof"]["valid"], true);
}

#[test]
fn check_exit_codes() {
    for name in ["arithmetic", "failure", "loop", "remark", "conjunction", "quantifier", "symmetric"] {
        assert_eq!(run(&["check", "--problem", &fixture(name)]).status.code(), Some(0), "{name}");
    }
    let text = std::fs::read_to_string(fixture("failure")).unwrap().replace("(cut {P(a)}", "(cut {P(b)}");
    let broken = scratch("broken.problem");
    std::fs::write(&broken, text).unwrap();
    let (code, v) = json(&["check", "--problem", broken.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(v["details"]["proof"]["failures"][0]["kind"], "side-condition");

    let (code, v) = json(&["check", "--problem", &fixture("arithmetic"), "--budget", "2"]);
    assert_eq!(code, 2);
    assert_eq!(v["outcome"], "unknown");
    assert_eq!(v["complete"], false);
}

#[test]
fn prove_atomic_modes() {
    let f = fixture("failure");
    let (code, v) = json(&["prove-atomic", "--problem", &f, "--mode", "asym"]);
    assert_eq!(code, 0);
    assert_eq!(v["details"]["proof"]["cuts"], 1);
    assert_eq!(witnesses_recheck(&v), 1);
    let (code, v) = json(&["prove-atomic", "--problem", &f, "--mode", "cutfree"]);
    assert_eq!(code, 1);
    assert_eq!(v["verdict"], "not-provable");
    let (code, _) = json(&["prove-atomic", "--problem", &f, "--mode", "sym"]);
    assert_eq!(code, 0);
    let out = run(&["prove-atomic", "--problem", &fixture("arithmetic"), "--mode", "asym"]);
    assert_eq!(out.status.code(), Some(3), "non-atomic goals are a usage error");
}

#[test]
fn eliminate_writes_traces() {
    let trace = scratch("loop-trace.json");
    let _ = std::fs::remove_file(&trace);
    let out = run(&[
        "--format",
        "json",
        "--trace",
        trace.to_str().unwrap(),
        "eliminate",
        "--problem",
        &fixture("loop"),
        "--engine",
        "newman",
        "--policy",
        "scripted",
        "--steps",
        "6",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let t: Value = serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    let steps = t["steps"].as_array().unwrap();
    assert_eq!(steps.len(), 6);
    assert_eq!(steps[0]["event"]["kind"], "split");
    let cuts: Vec<&str> = steps.iter().filter_map(|s| s["cut"].as_str()).collect();
    assert!(cuts.contains(&"P(a)") && cuts.contains(&"P(b)"), "{cuts:?}");
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "budget-exhausted");
    assert!(witnesses_recheck(&v) >= 1);

    let (code, v) = json(&["eliminate", "--problem", &fixture("conjunction"), "--engine", "full"]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "cut-free");
    assert_eq!(witnesses_recheck(&v), 1);

    let (code, v) = json(&["eliminate", "--problem", &fixture("symmetric"), "--engine", "sym-atomic"]);
    assert_eq!(code, 0, "{v}");
}

#[test]
fn refutations_carry_replayable_witnesses() {
    let (code, v) = json(&["eliminate", "--problem", &fixture("failure"), "--engine", "newman"]);
    assert_eq!(code, 1);
    assert!(witnesses_recheck(&v) >= 1);
    for check in ["confluence", "termination", "local-confluence"] {
        let (code, v) = json(&["analyze", "--problem", &fixture("loop"), "--check", check]);
        let expected = if check == "local-confluence" { 0 } else { 1 };
        assert_eq!(code, expected, "{check}: {v}");
        if code == 1 {
            assert!(witnesses_recheck(&v) >= 1, "{check}: {v}");
        }
    }
    let (code, v) = json(&["analyze", "--problem", &fixture("failure"), "--check", "equivalence"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["details"]["agree"], true);
}

#[test]
fn random_test_runs_and_is_deterministic() {
    let (code, a) = json(&["random-test", "--suite", "main-equivalence", "--count", "20", "--seed", "5"]);
    assert_eq!(code, 0);
    let (_, b) = json(&["random-test", "--suite", "equivalence", "--count", "20", "--seed", "5"]);
    assert_eq!(a["details"], b["details"]);
    for suite in ["newman", "prop6", "prop7", "def1"] {
        let (code, v) = json(&["random-test", "--suite", suite, "--count", "10"]);
        assert_eq!(code, 0, "{suite}: {v}");
    }
}
