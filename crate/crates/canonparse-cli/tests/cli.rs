//! End-to-end tests of the `canonparse` binary: every subcommand, the
//! documented exit codes, and the budget environment variable.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_canonparse"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    let mut cmd = binary();
    for a in args {
        if let Some(name) = a.strip_prefix("fixture:") {
            cmd.arg(fixture(name));
        } else {
            cmd.arg(a);
        }
    }
    cmd.env_remove("CANONPARSE_BUDGET");
    cmd.output().expect("the binary should run")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("stdout should be UTF-8")
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("stderr should be UTF-8")
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("the binary should not be killed by a signal")
}

#[test]
fn transform_summarizes_the_enriched_system() {
    let out = run(&["transform", "--system", "arc-standard"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("features per symbol: 3"), "got: {text}");
    assert!(text.contains("transitions (6):"), "got: {text}");
    for t in ["sh.s", "sh.ns", "la.s:2,1", "la.ns:2,1", "ra.s:2,1", "ra.ns:2,1"] {
        assert!(text.contains(t), "missing {t} in: {text}");
    }
}

#[test]
fn transform_rejects_non_monotonic_systems() {
    let out = run(&["transform", "--system", "la:3,1"]);
    assert_eq!(exit_code(&out), 1);
    let text = stderr(&out);
    assert!(text.contains("not monotonic"), "got: {text}");
    assert!(text.contains("la:2,1"), "the message should name the missing template: {text}");
}

#[test]
fn verify_passes_for_arc_standard() {
    let out = run(&["verify", "--system", "arc-standard", "--max-len", "3"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    assert!(!text.contains("FAIL"), "got: {text}");
    // Monotonicity plus four checks at each of three lengths.
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 13, "got: {text}");
}

#[test]
fn verify_fails_fast_for_non_monotonic_systems() {
    let out = run(&["verify", "--system", "la:3,1", "--max-len", "2"]);
    assert_eq!(exit_code(&out), 1);
    let text = stdout(&out);
    assert!(text.contains("FAIL monotonicity"), "got: {text}");
}

#[test]
fn enumerate_reports_base_ambiguity_as_tsv() {
    let out = run(&["enumerate", "--system", "arc-standard", "--len", "3"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("n\tsystem\tcomputations\ttrees\tmax_ambiguity")
    );
    assert_eq!(lines.next(), Some("3\tla:2,1;ra:2,1\t13\t12\t2"));
    assert_eq!(lines.next(), None);
}

#[test]
fn enumerate_reports_the_enriched_system_as_unambiguous() {
    let out = run(&["enumerate", "--system", "arc-standard", "--len", "3", "--enriched"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    assert!(
        text.lines().nth(1) == Some("3\tenriched(la:2,1;ra:2,1)\t12\t12\t1"),
        "got: {text}"
    );
}

#[test]
fn oracle_prints_one_sequence_per_sentence() {
    let out = run(&["oracle", "--system", "arc-standard", "--conll", "fixture:projective.conll"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines,
        vec![
            "sent 1: sh sh la:2,1 sh ra:2,1 ra:2,1",
            "sent 2: sh ra:2,1",
            "sent 3: sh sh la:2,1 ra:2,1",
        ]
    );
}

#[test]
fn oracle_enriched_prints_the_annotated_sequence() {
    let out = run(&[
        "oracle",
        "--system",
        "arc-standard",
        "--conll",
        "fixture:projective.conll",
        "--enriched",
    ]);
    assert_eq!(exit_code(&out), 0);
    let first = stdout(&out).lines().next().map(str::to_owned);
    assert_eq!(
        first.as_deref(),
        Some("sent 1: sh.s sh.ns la.ns:2,1 sh.s ra.s:2,1 ra.s:2,1")
    );
}

#[test]
fn oracle_marks_unparseable_sentences() {
    let out = run(&[
        "oracle",
        "--system",
        "arc-standard",
        "--conll",
        "fixture:nonprojective_deg2.conll",
    ]);
    assert_eq!(exit_code(&out), 0, "data outcomes are not process failures");
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.ends_with("UNPARSEABLE")).count(), 2, "got: {text}");
}

#[test]
fn oracle_marks_malformed_sentences() {
    let path = std::env::temp_dir().join(format!("canonparse-cli-malformed-{}.conll", std::process::id()));
    // Node 2 is its own head, so the sentence encodes no tree.
    std::fs::write(&path, "1\ta\t_\t_\t_\t_\t2\t_\t_\t_\n2\tb\t_\t_\t_\t_\t2\t_\t_\t_\n").unwrap();
    let out = run(&["oracle", "--system", "arc-standard", "--conll", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("sent 1: MALFORMED ("), "got: {text}");
}

#[test]
fn oracle_rejects_unreadable_files() {
    let out = run(&["oracle", "--system", "arc-standard", "--conll", "/nonexistent.conll"]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("/nonexistent.conll"));
}

#[test]
fn oracle_enriched_requires_a_monotonic_system() {
    let out = run(&[
        "oracle",
        "--system",
        "la:3,1",
        "--conll",
        "fixture:projective.conll",
        "--enriched",
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("not monotonic"));
}

#[test]
fn coverage_tabulates_each_file() {
    let out = run(&[
        "coverage",
        "--system",
        "attardi:3",
        "--conll",
        "fixture:projective.conll",
        "fixture:nonprojective_deg2.conll",
        "fixture:unparseable_attardi3.conll",
    ]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4, "got: {text}");
    assert_eq!(lines[0], "source\tsize\tfailures\tnon_projective\tmalformed");
    assert!(lines[1].ends_with("projective.conll\t3\t0\t0\t0"), "got: {}", lines[1]);
    assert!(lines[2].ends_with("nonprojective_deg2.conll\t2\t0\t2\t0"), "got: {}", lines[2]);
    assert!(lines[3].ends_with("unparseable_attardi3.conll\t3\t2\t2\t0"), "got: {}", lines[3]);
}

#[test]
fn coverage_keeps_going_past_unreadable_files() {
    let out = run(&[
        "coverage",
        "--system",
        "arc-standard",
        "--conll",
        "/nonexistent.conll",
        "fixture:projective.conll",
    ]);
    assert_eq!(exit_code(&out), 1);
    assert!(stderr(&out).contains("/nonexistent.conll"));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3, "both rows still appear: {text}");
    assert_eq!(lines[1], "/nonexistent.conll\t0\t0\t0\t0");
    assert!(lines[2].ends_with("projective.conll\t3\t0\t0\t0"), "got: {}", lines[2]);
}

#[test]
fn coverage_requires_a_monotonic_system() {
    let out = run(&["coverage", "--system", "la:3,1", "--conll", "fixture:projective.conll"]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("monotonic"));
}

#[test]
fn budget_flag_limits_enumeration() {
    let out = run(&["enumerate", "--system", "arc-standard", "--len", "4", "--budget", "3"]);
    assert_eq!(exit_code(&out), 1);
    assert!(stderr(&out).contains("budget"), "got: {}", stderr(&out));
}

#[test]
fn budget_env_var_limits_enumeration() {
    let out = binary()
        .args(["enumerate", "--system", "arc-standard", "--len", "4"])
        .env("CANONPARSE_BUDGET", "3")
        .output()
        .expect("the binary should run");
    assert_eq!(exit_code(&out), 1);
    assert!(stderr(&out).contains("budget"), "got: {}", stderr(&out));
}

#[test]
fn budget_flag_overrides_the_env_var() {
    let out = binary()
        .args(["enumerate", "--system", "arc-standard", "--len", "4", "--budget", "100000"])
        .env("CANONPARSE_BUDGET", "3")
        .output()
        .expect("the binary should run");
    assert_eq!(exit_code(&out), 0);
    assert!(stdout(&out).contains("\t55\t"), "got: {}", stdout(&out));
}

#[test]
fn invalid_budget_env_var_is_a_usage_error() {
    let out = binary()
        .args(["enumerate", "--system", "arc-standard", "--len", "2"])
        .env("CANONPARSE_BUDGET", "many")
        .output()
        .expect("the binary should run");
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("CANONPARSE_BUDGET"));
}

#[test]
fn unknown_system_names_are_usage_errors() {
    let out = run(&["enumerate", "--system", "bogus", "--len", "2"]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("bogus"));
}
