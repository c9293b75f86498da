use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const F4: &str = "aag 5 2 0 1 3\n2\n4\n11\n6 2 5\n8 3 4\n10 7 9\ni1 controllable_c\n";
const F4_SOLUTION: &str = "aag 5 1 0 1 4\n2\n11\n6 2 5\n8 3 4\n10 7 9\n4 2 2\ni1 controllable_c\n";
const TOGGLE: &str = "aag 1 0 1 1 0\n2 3\n2\n";
const BUFFER: &str = "aag 1 1 0 1 0\n2\n2\n";

fn aigsyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aigsyn"))
        .args(args)
        .env_remove("AIGSYN_NODE_CAP")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn f4_end_to_end() {
    let dir = TempDir::new().unwrap();
    let spec = write(dir.path(), "f4.aag", F4);
    let sol = dir.path().join("sol.aag");

    let out = aigsyn(&["synthesize", s(&spec), "-o", s(&sol)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out), "REALIZABLE\n");
    assert_eq!(fs::read_to_string(&sol).unwrap(), F4_SOLUTION);

    let out = aigsyn(&["check-syntax", "--spec", s(&spec), "--solution", s(&sol)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("PASS c=1 l=0 a=1\n"));

    let out = aigsyn(&["model-check", s(&sol)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "SAFE\n");
}

#[test]
fn synthesize_prints_solution_after_verdict() {
    let dir = TempDir::new().unwrap();
    let spec = write(dir.path(), "f4.aag", F4);
    let out = aigsyn(&["synthesize", s(&spec), "--verify"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), format!("REALIZABLE\n{F4_SOLUTION}"));
    assert!(stderr(&out).contains("model check SAFE"));
}

#[test]
fn toggle_is_unsafe_with_trace() {
    let dir = TempDir::new().unwrap();
    let file = write(dir.path(), "toggle.aag", TOGGLE);
    for engine in ["bdd", "explicit"] {
        let out = aigsyn(&["model-check", s(&file), "--engine", engine]);
        assert_eq!(out.status.code(), Some(1));
        assert_eq!(stdout(&out), "UNSAFE\nTRACE\n\n\n");
    }
}

#[test]
fn buffer_trace_lists_inputs() {
    let dir = TempDir::new().unwrap();
    let file = write(dir.path(), "buffer.aag", BUFFER);
    let out = aigsyn(&["model-check", s(&file)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out), "UNSAFE\nTRACE\n1\n");
}

#[test]
fn garbage_is_a_parse_error() {
    let dir = TempDir::new().unwrap();
    let file = write(dir.path(), "garbage.txt", "this is not aiger\n");
    let out = aigsyn(&["validate", s(&file)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr(&out).contains("line 1: [bad-magic]"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn validate_distinguishes_invalid_from_unreadable() {
    let dir = TempDir::new().unwrap();
    let ok = write(dir.path(), "f4.aag", F4);
    assert_eq!(aigsyn(&["validate", s(&ok)]).status.code(), Some(0));
    let undefined = write(dir.path(), "undef.aag", "aag 2 1 0 1 0\n2\n4\n");
    let out = aigsyn(&["validate", s(&undefined)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("undefined-literal"));
    let two_outputs = write(dir.path(), "two.aag", "aag 1 1 0 2 0\n2\n2\n3\n");
    assert_eq!(
        aigsyn(&["validate", s(&two_outputs)]).status.code(),
        Some(1)
    );
}

#[test]
fn realizability_verdicts() {
    let dir = TempDir::new().unwrap();
    let f4 = write(dir.path(), "f4.aag", F4);
    let buffer = write(dir.path(), "buffer.aag", BUFFER);
    let out = aigsyn(&["realizability", s(&f4)]);
    assert_eq!(
        (out.status.code(), stdout(&out)),
        (Some(0), "REALIZABLE\n".into())
    );
    let out = aigsyn(&["realizability", s(&buffer)]);
    assert_eq!(
        (out.status.code(), stdout(&out)),
        (Some(1), "UNREALIZABLE\n".into())
    );
}

#[test]
fn mark_then_synthesize() {
    let dir = TempDir::new().unwrap();
    let plain = write(
        dir.path(),
        "xor.aag",
        "aag 5 2 0 1 3\n2\n4\n11\n6 2 5\n8 3 4\n10 7 9\ni0 u\n",
    );
    let marked = dir.path().join("marked.aag");
    let out = aigsyn(&["mark", s(&plain), "--inputs", "1", "-o", s(&marked)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(
        fs::read_to_string(&marked).unwrap(),
        "aag 5 2 0 1 3\n2\n4\n11\n6 2 5\n8 3 4\n10 7 9\ni0 u\ni1 controllable_1\n"
    );
    let out = aigsyn(&["synthesize", s(&marked), "--verify"]);
    assert_eq!(out.status.code(), Some(0));

    let out = aigsyn(&["mark", s(&plain), "--inputs", "nosuch"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failing_check_and_json() {
    let dir = TempDir::new().unwrap();
    let spec = write(dir.path(), "f4.aag", F4);
    let bad = write(
        dir.path(),
        "bad.aag",
        &F4_SOLUTION.replace("4 2 2", "4 6 6"),
    );
    let out = aigsyn(&["check-syntax", "--spec", s(&spec), "--solution", s(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("FAIL"));
    let out = aigsyn(&[
        "check-syntax",
        "--spec",
        s(&spec),
        "--solution",
        s(&bad),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let json = stdout(&out);
    assert!(json.contains("\"verdict\": \"fail\""), "{json}");
    assert!(json.contains("\"R7\""), "{json}");
}

#[test]
fn resource_limit_exit_code() {
    let dir = TempDir::new().unwrap();
    let f4 = write(dir.path(), "f4.aag", F4);
    let out = aigsyn(&["realizability", s(&f4), "--node-cap", "3"]);
    assert_eq!(out.status.code(), Some(3));
    let out = Command::new(env!("CARGO_BIN_EXE_aigsyn"))
        .args(["model-check", s(&f4)])
        .env("AIGSYN_NODE_CAP", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn usage_errors() {
    assert_eq!(aigsyn(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        aigsyn(&["model-check", "--bogus-flag", "x"]).status.code(),
        Some(2)
    );
    assert_eq!(
        aigsyn(&["model-check", "/nonexistent/file.aag"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn batch_mode_summarises_each_file() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "a_f4.aag", F4);
    write(dir.path(), "b_sol.aag", F4_SOLUTION);
    write(dir.path(), "c_toggle.aag", TOGGLE);
    write(dir.path(), "notes.txt", "ignored");
    let out = aigsyn(&["model-check", s(dir.path()), "--jobs", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let lines: Vec<Vec<String>> = stdout(&out)
        .lines()
        .map(|l| l.split(' ').map(String::from).collect())
        .collect();
    let summary: Vec<(&str, &str)> = lines
        .iter()
        .map(|l| (l[0].as_str(), l[1].as_str()))
        .collect();
    assert_eq!(
        summary,
        vec![
            ("a_f4.aag", "UNSAFE"),
            ("b_sol.aag", "SAFE"),
            ("c_toggle.aag", "UNSAFE")
        ]
    );
    assert!(lines
        .iter()
        .all(|l| l.len() == 3 && l[2].parse::<u64>().is_ok()));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let f4 = write(dir.path(), "f4.aag", F4);
    let a = aigsyn(&["synthesize", s(&f4)]);
    let b = aigsyn(&["synthesize", s(&f4)]);
    assert_eq!(a.stdout, b.stdout);
}
