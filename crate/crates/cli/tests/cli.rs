use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_adasync"))
}

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(rel)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn decide_exit_codes() {
    let o = run(&["decide", path(&fixture("run4.pda"))]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("answer: YES\n"));
    let o = run(&["decide", path(&fixture("corpus/swap.pda"))]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("answer: NO\n"));
    let o = run(&["decide", "/nonexistent/file.pda"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn parse_errors_exit_2_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.pda");
    std::fs::write(&f, "pda\nstates 1\ninputs a\nstack bot\nbottom bot\ntrans 1 b bot -> 1 bot\n").unwrap();
    let o = run(&["decide", path(&f)]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 6"), "{err}");
}

#[test]
fn decide_output_is_deterministic() {
    let f = fixture("corpus/partial_homing.pda");
    let a = run(&["decide", path(&f)]);
    let b = run(&["decide", path(&f)]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn witness_file_round_trips_through_check_witness() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.tree");
    let f = fixture("run4.pda");
    for variant in ["special", "given", "homing"] {
        let o = run(&["decide", path(&f), "--variant", variant, "--witness", path(&w)]);
        assert_eq!(code(&o), 0, "{variant}");
        let o = run(&["check-witness", path(&f), path(&w), "--variant", variant]);
        assert_eq!(code(&o), 0, "{variant}: {}", stdout(&o));
    }
    // a RUN4 witness means nothing for another automaton
    run(&["decide", path(&f), "--witness", path(&w)]);
    let o = run(&["check-witness", path(&fixture("corpus/swap.pda")), path(&w)]);
    assert_ne!(code(&o), 0);
}

#[test]
fn dot_witness() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.dot");
    let o = run(&["decide", path(&fixture("run4.pda")), "--witness", path(&w), "--dot"]);
    assert_eq!(code(&o), 0);
    let dot = std::fs::read_to_string(&w).unwrap();
    assert!(dot.starts_with("digraph"), "{dot}");
}

#[test]
fn reduce_then_decide_matches_direct_decide() {
    let dir = tempfile::tempdir().unwrap();
    let r = dir.path().join("r.pda");
    for (file, variant, to) in [
        ("run4.pda", "given", "super"),
        ("corpus/split.pda", "homing", "given"),
        ("corpus/funnel.pda", "ada", "given"),
        ("corpus/nondet_no.pda", "given", "super"),
    ] {
        let f = fixture(file);
        let o = run(&["reduce", path(&f), "--variant", variant, "--to", to]);
        assert_eq!(code(&o), 0, "{file}");
        let text = stdout(&o);
        assert!(text.contains("\n# "), "name map missing: {text}");
        std::fs::write(&r, text).unwrap();
        let direct = code(&run(&["decide", path(&f), "--variant", variant]));
        let reduced = code(&run(&["decide", path(&r)]));
        assert_eq!(direct, reduced, "{file}");
    }
}

#[test]
fn reduce_rejects_unknown_gadget() {
    let o = run(&["reduce", path(&fixture("run4.pda")), "--gadget", "nope"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn aeps_to_pda_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("n.pda");
    let o = run(&["aeps-to-pda", path(&fixture("aeps/neps_counter.aeps"))]);
    assert_eq!(code(&o), 0);
    std::fs::write(&p, stdout(&o)).unwrap();
    let o = run(&["is-deterministic", path(&p)]);
    assert_eq!(stdout(&o), "deterministic: true\n");
    assert_eq!(code(&o), 0);
    let o = run(&["is-deterministic", path(&fixture("corpus/nondet.pda"))]);
    assert_eq!(code(&o), 1);
    assert_eq!(code(&run(&["decide", path(&fixture("aeps/two_vars.aeps"))])), 0);
    assert_eq!(code(&run(&["decide", path(&fixture("aeps/contradiction.aeps"))])), 1);
}

#[test]
fn oracle_agrees_on_corpus() {
    for entry in std::fs::read_dir(fixture("corpus")).unwrap() {
        let f = entry.unwrap().path();
        let d = code(&run(&["decide", path(&f)]));
        let o = run(&["oracle", path(&f), "--stack-bound", "8", "--depth-bound", "64", "--node-budget", "400000"]);
        assert_eq!(d, code(&o), "{}", f.display());
    }
}

#[test]
fn oracle_rejects_zero_bounds() {
    let o = run(&["oracle", path(&fixture("run4.pda")), "--stack-bound", "0"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn solver_flag() {
    let f = fixture("corpus/nondet.pda");
    assert_eq!(code(&run(&["decide", path(&f), "--solver", "sparse"])), 2);
    assert_eq!(code(&run(&["decide", path(&f), "--solver", "saturation"])), 0);
    let o = run(&["decide", path(&fixture("run4.pda")), "--state-budget", "1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn generate_is_seeded_and_parseable() {
    let dir = tempfile::tempdir().unwrap();
    for kind in ["pda", "aps", "aeps"] {
        let a = run(&["generate", "--seed", "11", "--kind", kind]);
        let b = run(&["generate", "--seed", "11", "--kind", kind]);
        assert_eq!(a.stdout, b.stdout);
        let f = dir.path().join(format!("g.{kind}"));
        std::fs::write(&f, &a.stdout).unwrap();
        let c = code(&run(&["decide", path(&f)]));
        assert!(c == 0 || c == 1, "{kind}: {}", stdout(&a));
    }
}

#[test]
fn stdin_input() {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = bin().args(["decide", "-"]).stdin(Stdio::piped()).stdout(Stdio::piped()).spawn().unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(std::fs::read(fixture("run4.pda")).unwrap().as_slice())
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(code(&o), 0);
}
