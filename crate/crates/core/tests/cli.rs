use std::fs;
use std::process::{Command, Output};

use mclex::closure::TableauProof;
use mclex::enumeration::PosetGraph;

fn mclex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mclex"))
        .args(args)
        .env_remove("MCLEX_CHECKPOINT_DIR")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const MALTSEV: &str = "1 2 2 | 1 ; 2 2 1 | 1";
const SU: &str = "1 * * | 1 ; 2 2 1 | 1";

#[test]
fn decide_exit_codes() {
    assert_eq!(mclex(&["decide", "--lhs", MALTSEV, "--rhs", SU]).status.code(), Some(0));
    let o = mclex(&["decide", "--lhs", "1 * | 1 ; * 1 | 1", "--rhs", "1 * | 1 ; 1 1 | *"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).trim(), "false");
    let o = mclex(&["decide", "--lhs", "1 * | 1 ; * 1", "--rhs", SU]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1, column"));
    assert_eq!(mclex(&["decide", "--lhs", SU]).status.code(), Some(2));
}

#[test]
fn matrices_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.txt");
    fs::write(&path, "1 2 2 | 1\n2 2 1 | 1\n").unwrap();
    let o = mclex(&["decide", "--lhs", path.to_str().unwrap(), "--rhs", SU]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn tableau_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    let p = path.to_str().unwrap();
    let o = mclex(&["decide", "--lhs", "1 * * | 1 ; 2 1 2 | 1", "--rhs", "1 1 * | 1 ; * * 1 | 1 ; 1 * 1 | *", "--tableau", p]);
    assert_eq!(o.status.code(), Some(0));
    let proof = TableauProof::from_json(&fs::read_to_string(&path).unwrap()).unwrap();
    assert!(proof.verdict);
    assert_eq!(mclex(&["check-tableau", p]).status.code(), Some(0));

    let mut bad = proof.clone();
    bad.steps.swap(1, 2);
    fs::write(&path, bad.to_json()).unwrap();
    assert_eq!(mclex(&["check-tableau", p]).status.code(), Some(1));

    fs::write(&path, "{").unwrap();
    assert_eq!(mclex(&["check-tableau", p]).status.code(), Some(2));
}

#[test]
fn small_subcommands() {
    let o = mclex(&["degeneracy", "1 * | 1 ; 1 1 | *"]);
    assert_eq!(stdout(&o).trim(), "proper");
    assert_eq!(stdout(&mclex(&["degeneracy", "| *"])).trim(), "anti-trivial");
    assert_eq!(stdout(&mclex(&["degeneracy", "* | 1"])).trim(), "trivial");
    assert_eq!(stdout(&mclex(&["canonical", SU])).trim(), "1 * * | 1 ; 2 1 2 | 1");
    assert_eq!(stdout(&mclex(&["loc", "1 * | 1 ; * 1 | 1"])).trim(), "2 1 2 | 1 ; 2 2 1 | 1");
    assert_eq!(mclex(&["loc-equal", "1 * | 1 ; * 1 | 1", MALTSEV]).status.code(), Some(0));
    assert_eq!(mclex(&["loc-equal", "1 * | 1 ; * 1 | 1", "| 1"]).status.code(), Some(1));
    assert_eq!(mclex(&["admissible", MALTSEV, "2"]).status.code(), Some(0));
    assert_eq!(mclex(&["admissible", MALTSEV, "1"]).status.code(), Some(1));
    assert_eq!(mclex(&["admissible", SU, "1"]).status.code(), Some(2));
    assert_eq!(
        stdout(&mclex(&["maltsev-condition", "1 * | 1 ; 1 1 | *"])).trim(),
        "p(x1,∗)=x1 ; p(x1,x1)=∗"
    );
    assert_eq!(mclex(&["oracle-check", "--level", "fast"]).status.code(), Some(0));
    assert!(stdout(&mclex(&["--version"])).starts_with("mclex "));
}

#[test]
fn enumerate_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("p.json");
    let dot = dir.path().join("h.dot");
    let o = mclex(&["enumerate", "2", "3", "2", "--out", json.to_str().unwrap(), "--dot", dot.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&json).unwrap();
    let g = PosetGraph::from_json(&text).unwrap();
    assert_eq!(g.classes.len(), 6);
    assert_eq!(g.to_json(), text);
    let dot = fs::read_to_string(&dot).unwrap();
    assert_eq!(dot.lines().filter(|l| l.trim_start().starts_with('c') && l.contains("[label=")).count(), 6);
    assert_eq!(dot.matches("subgraph cluster_").count(), g.groups.len());

    let o = mclex(&["enumerate", "3", "4", "2", "--subposet-loc", "maltsev", "--counts-only"]);
    assert!(stdout(&o).contains("45 classes"), "{}", stdout(&o));
    assert_eq!(mclex(&["enumerate", "2", "3", "2", "--subposet-loc", "nope"]).status.code(), Some(2));
    assert_eq!(mclex(&["enumerate", "2", "3", "2", "--workers", "0"]).status.code(), Some(2));
}

#[test]
fn checkpoints_resume_and_reject_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let first = mclex(&["enumerate", "3", "3", "2", "--checkpoint", d, "--list"]);
    assert_eq!(first.status.code(), Some(0));
    let file = dir.path().join("classify-3-3-2.json");
    assert!(file.exists());
    let again = mclex(&["enumerate", "3", "3", "2", "--checkpoint", d, "--list"]);
    assert_eq!(stdout(&again), stdout(&first));

    let env = Command::new(env!("CARGO_BIN_EXE_mclex"))
        .args(["enumerate", "3", "3", "2", "--list"])
        .env("MCLEX_CHECKPOINT_DIR", d)
        .output()
        .unwrap();
    assert_eq!(stdout(&env), stdout(&first));

    let text = fs::read_to_string(&file).unwrap();
    fs::write(&file, text.replacen("\"next\":", "\"next\": 0, \"x\":", 1)).unwrap();
    let o = mclex(&["enumerate", "3", "3", "2", "--checkpoint", d]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("checkpoint"));
}
