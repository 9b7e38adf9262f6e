//! End-to-end tests of the `mvg` binary against the checked-in grammar corpus.

use std::io::Write as _;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use mvg_cli::format::{parse_grammar, serialize_grammar, ParsedGrammar};
use mvg_cli::treefile::{parse_tree, serialize_tree};
use mvg_core::samples;

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../grammars").join(name)
}

fn corpus_str(name: &str) -> String {
    corpus(name).display().to_string()
}

fn mvg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mvg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn mvg_with_stdin(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_mvg"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn exit_of(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

const SENTENCE: &str =
    "daß|der Meister|niemandem|den Kühlschrank|zu reparieren|zu versuchen|verspricht";

#[test]
fn corpus_files_match_the_sample_constructors() {
    let cases: Vec<(&str, ParsedGrammar)> = vec![
        ("g1.mvg", ParsedGrammar::Mslig(samples::count5())),
        ("g2.mvg", ParsedGrammar::Uvgdl(samples::scrambling_g2())),
        ("anbn.mvg", ParsedGrammar::Mslig(samples::anbn())),
        ("eps_unary.mvg", ParsedGrammar::Mslig(samples::eps_unary())),
        ("pure_cfg.mvg", ParsedGrammar::Mslig(samples::pure_cfg())),
        ("mixed.mvg", ParsedGrammar::Mslig(samples::mixed())),
    ];
    for (name, expected) in cases {
        let text = std::fs::read_to_string(corpus(name)).unwrap();
        let parsed = parse_grammar(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(parsed.grammar, expected, "{name}");
        assert_eq!(serialize_grammar(&parsed), text, "{name} round-trip");
    }
}

#[test]
fn tree_file_round_trips() {
    let text = std::fs::read_to_string(corpus("fig4.tree")).unwrap();
    let spec = parse_tree(&text).unwrap();
    assert_eq!(spec.vector, "v1");
    assert_eq!(spec.label, "q1");
    assert_eq!(serialize_tree(&spec), text);
}

#[test]
fn parse_accepts_and_rejects() {
    let ok = mvg(&["parse", &corpus_str("g1.mvg"), "--input", "a a b b c c d d e e"]);
    assert_eq!(exit_of(&ok), 0, "{ok:?}");
    assert_eq!(stdout_of(&ok), "accept\n");

    let no = mvg(&["parse", &corpus_str("g1.mvg"), "--input", "a a b"]);
    assert_eq!(exit_of(&no), 1);
    assert_eq!(stdout_of(&no), "reject\n");
}

#[test]
fn parse_converts_vector_grammars_and_splits_on_separator() {
    let out = mvg(&["parse", &corpus_str("g2.mvg"), "--sep", "|", "--input", SENTENCE]);
    assert_eq!(exit_of(&out), 0, "{out:?}");
    assert_eq!(stdout_of(&out), "accept\n");

    // Scrambled argument order is in the language too.
    let scrambled =
        "daß|den Kühlschrank|der Meister|niemandem|zu reparieren|zu versuchen|verspricht";
    let out = mvg(&["parse", &corpus_str("g2.mvg"), "--sep", "|", "--input", scrambled]);
    assert_eq!(exit_of(&out), 0);

    // Argument to the right of the verb cluster is not.
    let wrong = "daß|der Meister|niemandem|zu reparieren|zu versuchen|verspricht|den Kühlschrank";
    let out = mvg(&["parse", &corpus_str("g2.mvg"), "--sep", "|", "--input", wrong]);
    assert_eq!(exit_of(&out), 1);
}

#[test]
fn normalize_pipes_into_parse() {
    for form in ["--rinf", "--etf"] {
        let normalized = mvg(&["normalize", &corpus_str("g1.mvg"), form]);
        assert_eq!(exit_of(&normalized), 0);
        let reparsed = mvg_with_stdin(
            &["parse", "-", "--input", "a a b b c c d d e e"],
            &stdout_of(&normalized),
        );
        assert_eq!(exit_of(&reparsed), 0, "{form}: {reparsed:?}");
        assert_eq!(stdout_of(&reparsed), "accept\n");
    }
}

#[test]
fn convert_preserves_recognition() {
    let dir = tempfile::tempdir().unwrap();
    let converted = dir.path().join("g2_mslig.mvg");
    let out = mvg(&["convert", &corpus_str("g2.mvg"), "-o", converted.to_str().unwrap()]);
    assert_eq!(exit_of(&out), 0, "{out:?}");

    let text = std::fs::read_to_string(&converted).unwrap();
    assert!(matches!(parse_grammar(&text).unwrap().grammar, ParsedGrammar::Mslig(_)));

    let out = mvg(&["parse", converted.to_str().unwrap(), "--sep", "|", "--input", SENTENCE]);
    assert_eq!(exit_of(&out), 0);
    assert_eq!(stdout_of(&out), "accept\n");

    // The reverse direction goes through the normal form and uses reserved
    // names, which load fine but fail the user-level lint.
    let back = dir.path().join("anbn_uvgdl.mvg");
    let out = mvg(&["convert", &corpus_str("anbn.mvg"), "-o", back.to_str().unwrap()]);
    assert_eq!(exit_of(&out), 0, "{out:?}");
    let out = mvg(&["enumerate", back.to_str().unwrap(), "--max-len", "4"]);
    assert_eq!(exit_of(&out), 0);
    assert_eq!(stdout_of(&out), "\na a b b\na b\n");
    let out = mvg(&["lint", back.to_str().unwrap()]);
    assert_eq!(exit_of(&out), 1);
    assert!(stdout_of(&out).contains("reserved prefix"));
}

#[test]
fn enumerate_lists_the_bounded_language() {
    let out = mvg(&["enumerate", &corpus_str("anbn.mvg"), "--max-len", "6"]);
    assert_eq!(exit_of(&out), 0);
    assert_eq!(stdout_of(&out), "\na a a b b b\na a b b\na b\n");

    let out = mvg(&["enumerate", &corpus_str("g2.mvg"), "--max-len", "7", "--sep", "x"]);
    assert_eq!(exit_of(&out), 2, "unknown flag is a usage error");
}

#[test]
fn check_validates_the_sample_tree() {
    let out = mvg(&["check", &corpus_str("g2.mvg"), "--tree", &corpus_str("fig4.tree")]);
    assert_eq!(exit_of(&out), 0, "{out:?}");
    assert_eq!(
        stdout_of(&out),
        "valid: daß der Meister niemandem den Kühlschrank zu reparieren zu versuchen verspricht\n"
    );
}

#[test]
fn check_rejects_a_dominance_violation() {
    // The accusative argument sits above its own verb's chain, so v4's
    // dominance link cannot be satisfied.
    let bad = "(v1:q1@1\n  (v3:q1@1\n    (v4:q2@1)\n    (v4:q1@1\n      (v7:q1@1)\n      (v2:q1@1\n        (v5:q1@1)\n        (v2:q2@1\n          (v6:q1@1)\n          (v2:q3@1\n            (v3:q2@1)\n            (v2:q4@1)))))))\n";
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.tree");
    std::fs::write(&path, bad).unwrap();
    let out = mvg(&["check", &corpus_str("g2.mvg"), "--tree", path.to_str().unwrap()]);
    assert_eq!(exit_of(&out), 1, "{out:?}");
    let text = stdout_of(&out);
    assert!(text.contains("invalid:"), "{text}");
    assert!(text.contains("v4"), "{text}");
}

#[test]
fn dot_exports_draw_links_and_chart_cells() {
    let dir = tempfile::tempdir().unwrap();
    let tree_dot = dir.path().join("fig4.dot");
    let out = mvg(&[
        "check",
        &corpus_str("g2.mvg"),
        "--tree",
        &corpus_str("fig4.tree"),
        "--dot",
        tree_dot.to_str().unwrap(),
    ]);
    assert_eq!(exit_of(&out), 0);
    let text = std::fs::read_to_string(&tree_dot).unwrap();
    assert_eq!(text.matches("style=dashed").count(), 5, "one edge per discharged link");
    assert!(text.contains("shape=box"));

    let chart_dot = dir.path().join("chart.dot");
    let out = mvg(&[
        "parse",
        &corpus_str("anbn.mvg"),
        "--input",
        "a b",
        "--dot",
        chart_dot.to_str().unwrap(),
    ]);
    assert_eq!(exit_of(&out), 0);
    let text = std::fs::read_to_string(&chart_dot).unwrap();
    assert_eq!(text.matches("subgraph cluster").count(), 6, "cells for 0 <= i <= j <= 2");
}

#[test]
fn lint_passes_the_corpus() {
    for name in ["g1.mvg", "g2.mvg", "anbn.mvg", "eps_unary.mvg", "pure_cfg.mvg", "mixed.mvg"] {
        let out = mvg(&["lint", &corpus_str(name)]);
        assert_eq!(exit_of(&out), 0, "{name}: {out:?}");
        assert_eq!(stdout_of(&out), "ok\n", "{name}");
    }
}

#[test]
fn exit_codes_distinguish_failure_kinds() {
    // Missing file.
    let out = mvg(&["parse", "no-such-file.mvg", "--input", "a"]);
    assert_eq!(exit_of(&out), 2);

    // Syntax error.
    let out = mvg_with_stdin(&["lint", "-"], "%type mslig\n%start S\nS - >\n");
    assert_eq!(exit_of(&out), 2);
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 3"));

    // Validation error: index symbol collides with a terminal.
    let clash = "%type mslig\n%start S\n%index a\n\nS -> 'a' S[a]\nS ->\n";
    let out = mvg_with_stdin(&["lint", "-"], clash);
    assert_eq!(exit_of(&out), 2);

    // Wrong grammar kind for the subcommand.
    let out = mvg(&["normalize", &corpus_str("g2.mvg"), "--rinf"]);
    assert_eq!(exit_of(&out), 2);
    let out = mvg(&["check", &corpus_str("g1.mvg"), "--tree", &corpus_str("fig4.tree")]);
    assert_eq!(exit_of(&out), 2);

    // Flag conflicts.
    let out = mvg(&["normalize", &corpus_str("g1.mvg"), "--rinf", "--etf"]);
    assert_eq!(exit_of(&out), 2);
}
