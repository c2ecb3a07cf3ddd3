use std::io::Write;
use std::process::{Command, Stdio};

use finmodel_cli::{parse, parse_document, run, serialize_document, RunOptions, WorkspaceError};

fn exec(doc: &str, args: &[&str]) -> (i32, String, String) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_finmodel"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .env_remove("FINMODEL_BUDGET")
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(doc.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn report_lines(doc: &str) -> Vec<String> {
    let ws = parse(doc).expect("valid document");
    run(&ws, &RunOptions::default()).text.lines().map(|l| l.trim().to_string()).collect()
}

const SETS: &str = r#"{
  "instance": "sset:1",
  "objects": {"two": "discrete:2", "three": "discrete:3", "none": "empty"},
  "morphisms": {
    "f": {"source": "two", "target": "three", "images": [[0, 2]]},
    "z": {"source": "none", "target": "two", "preset": "unique"}
  },
  "commands": [
    {"op": "is-weq", "morphism": "f"},
    {"op": "is-weq", "morphism": "z"},
    {"op": "factorize", "morphism": "z"},
    {"op": "classify", "objects": ["two", "three", "none"]}
  ]
}"#;

const GRAPHS: &str = r#"{
  "instance": "sset:2",
  "objects": {
    "pt": "point",
    "I": "simplex:1",
    "loop": [[[]], [[0, 0]]],
    "two": "discrete:2"
  },
  "morphisms": {
    "i0": {"source": "pt", "target": "I", "images": [[0]]},
    "i1": {"source": "pt", "target": "I", "images": [[1]]},
    "fold": {"source": "two", "target": "pt", "preset": "unique"}
  },
  "commands": [
    {"op": "validate"},
    {"op": "is-weq", "morphism": "i0"},
    {"op": "is-weq", "morphism": "fold"},
    {"op": "classify", "corpus": {"vertices": 2, "edges": 2}},
    {"op": "ho-hom", "source": "two", "target": "two"},
    {"op": "ho-coproduct", "objects": ["pt", "pt"]},
    {"op": "homotopy-pushout", "left": "i0", "right": "i1", "tests": ["pt", "two"]},
    {"op": "weak-colimit", "diagram": {"discrete": ["pt", "pt"]}, "tests": ["pt", "two"]},
    {"op": "comparison", "diagram": {"discrete": ["pt", "two"]}},
    {"op": "e-image", "object": "loop", "A": ["pt", "I"]}
  ]
}"#;

const CHAIN: &str = r#"{
  "instance": "chain:2",
  "complexes": {
    "s": {"lo": -1, "dims": [1, 1, 1], "d": [[], [1], [0]]}
  },
  "chain-maps": {
    "id": {"source": "s", "target": "s", "lo": -1, "maps": [[1], [1], [1]]}
  },
  "commands": [
    {"op": "homology", "complex": "s"},
    {"op": "quasi-iso", "map": "id"},
    {"op": "truncate", "complex": "s", "k": 0},
    {"op": "verify-truncation-colimit", "complex": "s"}
  ]
}"#;

#[test]
fn minimal_point_document_parses() {
    let ws = parse(r#"{"instance": "sset:2", "objects": {"p": "point"}}"#).unwrap();
    assert_eq!(ws.objects.len(), 1);
    assert_eq!(ws.objects["p"].nondegenerate_count(0), 1);
}

#[test]
fn undeclared_morphism_is_unresolved() {
    let errs = parse(r#"{"instance": "sset:2", "objects": {"p": "point"},
        "commands": [{"op": "is-weq", "morphism": "g"}]}"#)
    .unwrap_err();
    assert_eq!(errs, vec![WorkspaceError::Unresolved { path: "commands[0]".into(), name: "g".into() }]);
}

#[test]
fn nonzero_square_names_degree() {
    let errs = parse(r#"{"instance": "chain:2",
        "complexes": {"c": {"lo": 0, "dims": [1, 1, 1], "d": [[], [1], [1]]}}}"#)
    .unwrap_err();
    match &errs[..] {
        [WorkspaceError::Invariant { path, message }] => {
            assert_eq!(path, "complexes.c");
            assert!(message.contains("degree 2"), "{message}");
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn error_classes_are_distinct() {
    assert!(matches!(parse_document("{\"instance\": }"), Err(WorkspaceError::Syntax { line: 1, .. })));
    let errs = parse(r#"{"instance": "sset:2", "objects": {"p": "point", "i": "simplex:1"},
        "morphisms": {"f": {"source": "i", "target": "p", "images": [[0]]}}}"#)
    .unwrap_err();
    assert!(matches!(errs[0], WorkspaceError::TypeMismatch { .. }), "{errs:?}");
    let errs = parse(r#"{"instance": "sset:2", "commands": [{"op": "cylinder"}]}"#).unwrap_err();
    assert!(matches!(errs[0], WorkspaceError::MissingParameter { .. }), "{errs:?}");
    let errs = parse(r#"{"instance": "chain:2", "commands": [{"op": "cylinder", "object": "x"}]}"#).unwrap_err();
    assert!(matches!(errs[0], WorkspaceError::TypeMismatch { .. }), "{errs:?}");
}

#[test]
fn errors_are_collected() {
    let errs = parse(r#"{"instance": "sset:2", "objects": {"p": "point"},
        "morphisms": {"f": {"source": "p", "target": "q", "preset": "identity"}},
        "commands": [{"op": "cylinder", "object": "r"}, {"op": "is-weq", "morphism": "f"}]}"#)
    .unwrap_err();
    assert_eq!(errs.len(), 2, "{errs:?}");
}

#[test]
fn map_between_nonempty_sets_is_weq() {
    let lines = report_lines(SETS);
    assert_eq!(lines[1], "[0] is-weq");
    assert_eq!(lines[2], "true");
    assert_eq!(lines[4], "false");
    assert!(lines.contains(&"empty: 1 [none]".to_string()));
    assert!(lines.contains(&"nonempty: 2 [two,three]".to_string()));
}

#[test]
fn classify_keys_by_component_count() {
    let lines = report_lines(GRAPHS);
    let start = lines.iter().position(|l| l == "[3] classify").unwrap();
    let table: Vec<&str> = lines[start + 1..].iter().take_while(|l| !l.starts_with('[')).map(String::as_str).collect();
    assert_eq!(table.len(), 3, "{table:?}");
    assert!(table[0].starts_with("pi0=0: 1 "));
    assert!(table[1].starts_with("pi0=1: 8 "));
    assert!(table[2].starts_with("pi0=2: 4 "));
}

#[test]
fn graph_commands_report() {
    let lines = report_lines(GRAPHS);
    let after = |header: &str| lines[lines.iter().position(|l| l == header).unwrap() + 1].clone();
    assert_eq!(after("[1] is-weq"), "true");
    assert_eq!(after("[2] is-weq"), "false");
    assert_eq!(after("[4] ho-hom"), "classes 4");
    assert_eq!(after("[5] ho-coproduct"), "cells [2,0]");
    assert!(lines.iter().all(|l| !l.starts_with("error")), "{lines:#?}");
    assert!(lines.contains(&"verified true".to_string()));
    assert_eq!(lines.iter().filter(|l| l.starts_with("certificate holds")).count(), 2);
}

#[test]
fn chain_commands_report() {
    let lines = report_lines(CHAIN);
    assert_eq!(&lines[2..5], ["H_-1 = 0", "H_0 = 0", "H_1 = 1"]);
    assert_eq!(lines[6], "true");
    assert_eq!(lines.last().unwrap(), "pass");
}

#[test]
fn truncation_colimit_passes_on_sample() {
    let (code, out, _) = exec(CHAIN, &[]);
    assert_eq!(code, 0);
    assert!(out.ends_with("  pass\n"), "{out}");
}

#[test]
fn reports_are_deterministic() {
    for doc in [SETS, GRAPHS, CHAIN] {
        let a = exec(doc, &[]);
        let b = exec(doc, &[]);
        assert_eq!(a, b);
    }
}

#[test]
fn round_trip_is_identity() {
    for doc in [SETS, GRAPHS, CHAIN] {
        let d = parse_document(doc).unwrap();
        let text = serialize_document(&d);
        assert_eq!(parse_document(&text).unwrap(), d);
        assert_eq!(serialize_document(&parse_document(&text).unwrap()), text);
    }
    let (code, out, _) = exec(GRAPHS, &["--normalize"]);
    assert_eq!(code, 0);
    assert_eq!(parse_document(&out).unwrap(), parse_document(GRAPHS).unwrap());
}

#[test]
fn exit_codes() {
    assert_eq!(exec(SETS, &[]).0, 0);
    assert_eq!(exec("not json", &[]).0, 2);
    assert_eq!(exec(r#"{"instance": "sset:9"}"#, &[]).0, 2);
    let (code, out, _) = exec(GRAPHS, &["--budget", "5"]);
    assert_eq!(code, 1);
    assert!(out.contains("error: search budget of 5"), "{out}");
    assert_eq!(exec(GRAPHS, &["--A", "pt,nowhere"]).0, 2);
}

#[test]
fn budget_from_environment() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_finmodel"))
        .env("FINMODEL_BUDGET", "5")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(GRAPHS.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn non_terminating_factorization_reports_trace() {
    let doc = r#"{"instance": "sset:3",
        "objects": {"loop": "bouquet:1", "pt": "point"},
        "morphisms": {"f": {"source": "loop", "target": "pt", "preset": "unique"}},
        "commands": [{"op": "factorize", "morphism": "f", "kind": "triv-cof-fib", "cap": 1}]}"#;
    let (code, out, _) = exec(doc, &[]);
    assert_eq!(code, 1, "{out}");
    assert!(out.contains("error: small object argument did not terminate within 1 steps"), "{out}");
    assert!(out.contains("terminated false"));
    assert!(out.contains("stage 1: cells"));
}

#[test]
fn naive_mode_flag_is_accepted() {
    let (code, out, _) = exec(SETS, &["--mode", "naive", "--cap", "8"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("terminated true"));
}
