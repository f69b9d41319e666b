use leafbranch::{parse_digraph, OutTree};
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_leafbranch"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn run_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

const CYCLE4: &str = "4 4\n0 1\n1 2\n2 3\n3 0\n";
const STAR3: &str = "4 3\n0 1\n0 2\n0 3\n";

#[test]
fn cycle_has_no_two_leaf_branching() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "cycle4.dg", CYCLE4);
    let o = run(&["solve", "--mode", "branching", "-k", "2", &f]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("NO"));
    let o = run(&["solve", "--mode", "branching", "-k", "1", "--json", &f]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["decision"], "YES");
}

#[test]
fn star_exact_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "star3.dg", STAR3);
    let o = run(&["exact", "--mode", "tree", &f]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "max leaves 3");
    let v = json(&run(&["exact", "--mode", "tree", "--json", &f]));
    assert_eq!(v["k"], 3);
    assert_eq!(v["route"], "oracle");
    assert_eq!(v["witness_root"], 0);
}

#[test]
fn exact_branching_without_branching_is_no() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "two.dg", "3 1\n0 1\n");
    assert_eq!(run(&["exact", "--mode", "branching", &f]).status.code(), Some(1));
}

#[test]
fn generated_digraph_piped_into_solve() {
    let g = run(&["gen", "--family", "scc-indeg3", "--n", "20", "--seed", "7"]);
    assert!(g.status.success());
    let d = parse_digraph(&stdout(&g)).unwrap();
    assert_eq!(d.n(), 20);

    let dir = tempfile::tempdir().unwrap();
    let wpath = dir.path().join("w.txt");
    let o = run_stdin(
        &["solve", "--mode", "branching", "-k", "2", "--json", "--witness", wpath.to_str().unwrap(), "-"],
        &g.stdout,
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["decision"], "YES");
    assert_eq!(v["problem"], "out-branching");
    let t = OutTree::parse_witness(d.n(), &std::fs::read_to_string(&wpath).unwrap()).unwrap();
    assert!(t.is_out_branching_of(&d) && t.leaf_count() >= 2);
    assert_eq!(v["witness_root"], t.root());
}

#[test]
fn generator_output_is_seeded() {
    for family in ["random", "scc-indeg3", "oriented-indeg2", "layered-indeg3", "cycle", "complete", "path"] {
        let args = ["gen", "--family", family, "--n", "12", "--seed", "3"];
        let a = run(&args);
        assert!(a.status.success(), "{family}");
        assert_eq!(a.stdout, run(&args).stdout);
        parse_digraph(&stdout(&a)).unwrap();
    }
}

#[test]
fn json_is_independent_of_thread_count() {
    let g = run(&["gen", "--family", "random", "--n", "40", "--p", "0.05", "--seed", "11"]);
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "g.dg", &stdout(&g));
    for k in [2, 5, 9] {
        let one = run(&["solve", "--mode", "tree", "-k", &k.to_string(), "--json", "--threads", "1", &f]);
        let four = run(&["solve", "--mode", "tree", "-k", &k.to_string(), "--json", "--threads", "4", &f]);
        assert_eq!(one.status.code(), four.status.code());
        assert_eq!(one.stdout, four.stdout);
    }
}

#[test]
fn decompose_then_check_td() {
    let dir = tempfile::tempdir().unwrap();
    let g = run(&["gen", "--family", "scc-indeg3", "--n", "25", "--seed", "4"]);
    let f = write(dir.path(), "g.dg", &stdout(&g));
    let td = run(&["decompose", &f]);
    assert!(td.status.success());
    let tdf = write(dir.path(), "g.td", &stdout(&td));
    let o = run(&["check-td", &tdf, &f]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("valid"));

    let lone = write(dir.path(), "one.td", "root 0\nnode 0: 0 1 2\n");
    let o = run(&["check-td", &lone, &f]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("invalid"));
    let garbled = write(dir.path(), "bad.td", "root 0\nbag 0\n");
    assert_eq!(run(&["check-td", &garbled, &f]).status.code(), Some(2));
}

#[test]
fn preprocess_drops_useless_arcs() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "d.dg", "3 3\n0 1\n1 2\n2 0\n");
    let o = run(&["preprocess", "--remove-useless", &f]);
    assert!(o.status.success());
    assert_eq!(parse_digraph(&stdout(&o)).unwrap().m(), 3);

    let f = write(dir.path(), "e.dg", "3 3\n0 1\n1 2\n2 1\n");
    let o = run(&["preprocess", "--remove-useless", &f]);
    let d = parse_digraph(&stdout(&o)).unwrap();
    assert_eq!(d.m(), 2);
    assert!(!d.has_arc(2, 1));
}

#[test]
fn bounds_emit_valid_witnesses() {
    let dir = tempfile::tempdir().unwrap();
    let g = run(&["gen", "--family", "scc-indeg3", "--n", "64", "--seed", "9"]);
    let text = stdout(&g);
    let d = parse_digraph(&text).unwrap();
    let f = write(dir.path(), "g.dg", &text);
    for which in ["backheads", "thm3", "path", "sqrt"] {
        let trace = dir.path().join(format!("{which}.trace"));
        let o = run(&["bound", "--which", which, "--trace", trace.to_str().unwrap(), &f]);
        assert_eq!(o.status.code(), Some(0), "{which}: {}", String::from_utf8_lossy(&o.stderr));
        let t = OutTree::parse_witness(d.n(), &stdout(&o)).unwrap();
        assert!(t.is_out_tree_of(&d), "{which}");
        if which == "thm3" || which == "sqrt" {
            assert!(t.is_out_branching_of(&d), "{which}");
        }
        assert!(!std::fs::read_to_string(&trace).unwrap().is_empty());
    }
}

#[test]
fn sqrt_bound_rejects_low_in_degree() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "c.dg", CYCLE4);
    let o = run(&["bound", "--which", "sqrt", &f]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("degree hypothesis"));
}

#[test]
fn input_and_usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "c.dg", CYCLE4);
    let bad = write(dir.path(), "bad.dg", "3 2\n0 1\n");
    let cases: [&[&str]; 6] = [
        &["solve", "--mode", "tree", "-k", "2", "--bogus", &f],
        &["solve", "--mode", "tree", "-k", "0", &f],
        &["solve", "--mode", "forest", "-k", "2", &f],
        &["solve", "--mode", "tree", "-k", "2", &bad],
        &["solve", "--mode", "tree", "-k", "2", "/nonexistent/file.dg"],
        &["gen", "--family", "nope", "--n", "5", "--seed", "1"],
    ];
    for args in cases {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    let o = run(&["solve", "--mode", "tree", "-k", "2", "--bogus", &f]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--bogus"));
}

#[test]
fn bench_suites_run() {
    let o = run(&["bench", "--suite", "bounds"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 4);
}
