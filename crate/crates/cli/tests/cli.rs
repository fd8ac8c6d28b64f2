//! End-to-end runs of the binary: exit codes, golden outputs, determinism,
//! and the JSON switch.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dilators"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, contents: &str) -> String {
    fs::write(dir.join(name), contents).unwrap();
    name.to_string()
}

const X_PLUS_X: &str = "predilator\nterm a arity=1 sigma=0\nterm b arity=1 sigma=0\ndist a b 0\n";
const X_TIMES_2: &str =
    "predilator\nterm int:c0 arity=1 sigma=0\nterm int:c1 arity=1 sigma=0\ndist int:c0 int:c1 1\n";
const FIGURE_TK: &str = "trekkable\n\
    node 0 parent=- e=0\nnode 1 parent=0 e=0\nnode 2 parent=1 e=-\n\
    node 3 parent=0 e=0\nnode 4 parent=1 e=-\nnode 5 parent=0 e=0\n\
    node 6 parent=5 e=-\nnode 7 parent=3 e=-\nnode 8 parent=5 e=-\n";

#[test]
fn check_valid_predilator_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "xx.pd", X_PLUS_X);
    let out = run_in(dir.path(), &["check", &f]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, "valid predilator; semiflower: false\n");
}

#[test]
fn check_flower_verdict_true() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "x2.pd", X_TIMES_2);
    let out = run_in(dir.path(), &["check", &f]);
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "valid predilator; semiflower: true\n"
    );
}

#[test]
fn check_invalid_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let broken = "predilator\nterm a arity=1 sigma=0\nterm b arity=1 sigma=0\ndist a b 9\n";
    let f = write(dir.path(), "bad.pd", broken);
    let out = run_in(dir.path(), &["check", &f]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains("violation"));
}

#[test]
fn parse_error_exits_two_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "junk.pd", "predilator\nterm ???\n");
    let out = run_in(dir.path(), &["check", &f]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 2"), "stderr was: {err}");
}

#[test]
fn diff_of_non_flower_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "xx.pd", X_PLUS_X);
    let out = run_in(dir.path(), &["diff", &f]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn apply_lists_the_lexicographic_chain() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "xx.pd", X_PLUS_X);
    let out = run_in(dir.path(), &["apply", &f, "--n", "3"]);
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "a(0)\na(1)\na(2)\nb(0)\nb(1)\nb(2)\n"
    );
}

#[test]
fn apply_empty_predilator_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "empty.pd", "predilator\n");
    let out = run_in(dir.path(), &["apply", &f, "--n", "5"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
}

#[test]
fn sort_matches_the_figure() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "fig.tk", FIGURE_TK);
    let out = run_in(dir.path(), &["sort", &f]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        &lines[..5],
        &[
            "inversions 4",
            "swap 2 3 inversions 3",
            "swap 4 5 inversions 2",
            "swap 6 7 inversions 1",
            "swap 3 4 inversions 0"
        ]
    );
}

#[test]
fn int_then_diff_roundtrips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "xx.pd", X_PLUS_X);
    let out = run_in(dir.path(), &["int", &f, "--out", "ixx.pd"]);
    assert!(out.status.success());
    let out = run_in(dir.path(), &["diff", "ixx.pd", "--out", "dixx.pd"]);
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("dixx.pd")).unwrap();
    // two unary terms at distance zero again
    assert!(text.contains("arity=1"));
    assert!(text.trim_end().ends_with("0"));
}

#[test]
fn dec_cell_roundtrip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "xx.pd", X_PLUS_X);
    assert!(run_in(dir.path(), &["cell", &f, "--out", "c.dg"]).status.success());
    assert!(run_in(dir.path(), &["dec", "c.dg", "--out", "back.pd"]).status.success());
    let back = fs::read_to_string(dir.path().join("back.pd")).unwrap();
    assert!(back.contains("arity=1"));
    let out = run_in(dir.path(), &["check", "back.pd"]);
    assert!(out.status.success());
}

#[test]
fn family_and_shoenfield_listings() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["family", "order", "--tree", "empty", "--prefix", "0,0,0"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "order 0 < 1 < 2\n");
    let out = run_in(dir.path(), &["family", "dilator", "--tree", "full", "--prefix", "0,0"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("predilator\n"));
    assert!(text.contains("term t0 arity=1"));
    let out = run_in(dir.path(), &["shoenfield", "--tree", "full", "--prefix", "0,0", "--n", "2"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "0 0\n0 1\n1 0\n1 1\n");
}

#[test]
fn family_check_accepts_builtins_and_flags_bad_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["family-check", "--tree", "seeded:9", "--play", "0,1,2,1", "--depth", "4"],
    );
    assert!(out.status.success());
    // a table missing its prefixes is not closed
    let spec = write(dir.path(), "open.tree", "tree table\nmember xs=0,1 ys=2,2\n");
    let out = run_in(
        dir.path(),
        &["family-check", "--tree", &spec, "--play", "0,1", "--depth", "2"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains("NotPrefixClosed"));
}

#[test]
fn game_solve_play_project() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "omega.pd", X_TIMES_2);
    let cfg = write(
        dir.path(),
        "g.game",
        "game\nmode ordinal\nkappa 3\nfamily tree full\nalphabet 2\ndepth 2\n\
         moves 0 1\ntargets 1\n",
    );
    let out = run_in(dir.path(), &["game", "solve", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("winner I"));
    assert!(text.contains("verified true"));

    let out = run_in(dir.path(), &["game", "play", &cfg]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("play I x=0 target=1"));
    assert!(text.contains("I wins (clean horizon)"));

    // dilator-mode projection along the identity embedding of a big flower
    let flower = "predilator\n\
        term a arity=3 sigma=2,1,0\nterm b arity=3 sigma=2,1,0\n\
        term c arity=3 sigma=2,1,0\nterm d arity=3 sigma=2,1,0\n\
        dist a b 1\ndist a c 1\ndist a d 1\ndist b c 1\ndist b d 1\ndist c d 1\n";
    write(dir.path(), "omega3.pd", flower);
    let cfg = write(
        dir.path(),
        "p.game",
        "game\nmode dilator\ntarget omega3.pd\nfamily prefix-of-target\n\
         alphabet 2\ndepth 4\nselector identity\n",
    );
    let out = run_in(dir.path(), &["game", "project", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8(out.stdout).unwrap().contains("lift clean true"));
}

#[test]
fn game_budget_exceeded_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "big.game",
        "game\nmode ordinal\nkappa 64\nfamily tree full\nalphabet 8\ndepth 12\n",
    );
    let out = run_in(dir.path(), &["game", "solve", &cfg]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn probe_constant_vs_family() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "xx.pd", X_PLUS_X);
    let out = run_in(dir.path(), &["probe", &f, "--carrier", "4", "--budget", "3"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "no witness\n");
}

#[test]
fn roundtrip_suite_reports_zero_failures() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["roundtrip", "--seed", "5", "--count", "25"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("failures 0"));
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = run_in(dir.path(), &["roundtrip", "--seed", "11", "--count", "10"]);
    let b = run_in(dir.path(), &["roundtrip", "--seed", "11", "--count", "10"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn json_switch_emits_one_document() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "xx.pd", X_PLUS_X);
    let out = run_in(dir.path(), &["--json", "check", &f]);
    assert!(out.status.success());
    let doc: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("stdout is one JSON document");
    assert_eq!(doc["verb"], "check");
    assert_eq!(doc["ok"], true);
}

#[test]
fn elem_decompose_emits_typed_steps() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "chain.tk",
        "trekkable\nnode 0 parent=- e=0\nnode 1 parent=0 e=0\nnode 2 parent=1 e=-\n",
    );
    let out = run_in(
        dir.path(),
        &["elem-decompose", &f, "--left", "2:0,1", "--right", "0:"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().skip(1).all(|l| l.starts_with("step A")), "{text}");
    // the reverse direction is not in order
    let out = run_in(
        dir.path(),
        &["elem-decompose", &f, "--left", "0:", "--right", "2:0,1"],
    );
    assert_eq!(out.status.code(), Some(4));
}
