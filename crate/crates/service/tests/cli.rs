use std::io::Write;
use std::process::{Command, Output, Stdio};

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");

fn taskbot(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_taskbot"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

#[test]
fn repl_writes_the_turn_log() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("taskbot.toml");
    let log = dir.path().join("turns.jsonl");
    std::fs::write(&config, format!("log_path = {:?}\nstate_dir = {:?}\n", log, dir.path().join("states"))).unwrap();

    let out = taskbot(&["--config", config.to_str().unwrap(), "--repl"], "hi\nI want to make lemon pie\n1\n/quit\n");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 3);
    assert!(stdout.lines().all(|l| l.starts_with("bot: ")));
    assert!(stdout.contains("Step 1"));
    assert_eq!(std::fs::read_to_string(&log).unwrap().lines().count(), 3);
    assert!(dir.path().join("states").read_dir().unwrap().count() > 0);

    let out = taskbot(&["--analyze", log.to_str().unwrap()], "");
    let report = String::from_utf8(out.stdout).unwrap();
    assert!(report.starts_with("conversations: 1\n"), "{report}");
}

#[test]
fn analyze_with_ratings() {
    let log = format!("{FIXTURES}/synthetic_log.jsonl");
    let ratings = format!("{FIXTURES}/synthetic_ratings.csv");
    let out = taskbot(&["--analyze", &log, "--ratings", &ratings], "");
    assert!(out.status.success());
    let report = String::from_utf8(out.stdout).unwrap();
    assert!(report.starts_with("conversations: 200\n"));
    assert!(report.contains("rating warnings: 2"));
}

#[test]
fn qa_eval_reports_every_k() {
    let out = taskbot(&["--qa-eval", &format!("{FIXTURES}/qa_eval.jsonl")], "");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = String::from_utf8(out.stdout).unwrap();
    for k in ["0", "1", "5"] {
        assert!(report.lines().any(|l| l.starts_with(&format!("{k:<4} all"))), "{report}");
    }
}

#[test]
fn bad_config_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    std::fs::write(&config, "[qa]\nk = 3\n").unwrap();
    let out = taskbot(&["--config", config.to_str().unwrap(), "--repl"], "");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("qa.k"));
}
