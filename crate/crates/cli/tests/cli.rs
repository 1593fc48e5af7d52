use std::path::Path;
use std::process::{Command, Output};

const CUBE: &str = "c 3-cube with four two-vertex clusters
p selcol 8 12 4
e 1 2
e 1 4
e 1 5
e 2 3
e 2 6
e 3 4
e 3 7
e 4 8
e 5 6
e 5 8
e 6 7
e 7 8
k 1 1 5
k 2 2 6
k 3 4 8
k 4 3 7
";

const C5: &str = "p selcol 5 5 5\ne 1 2\ne 2 3\ne 3 4\ne 4 5\ne 1 5\nk 1 1\nk 2 2\nk 3 3\nk 4 4\nk 5 5\n";

fn selcol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_selcol")).args(args).output().expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = selcol(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn solve_cube_with_every_method() {
    let dir = tempfile::tempdir().unwrap();
    let cube = write(dir.path(), "cube.selcol", CUBE);
    for (method, sub) in [
        ("ip", "mcs"),
        ("cutplane-perfect", "mcs"),
        ("cutplane-perfect", "sdp"),
        ("cutplane-general", "mcs"),
    ] {
        let out = stdout_of(&["solve", "--instance", &cube, "--method", method, "--subproblem", sub, "--time-limit", "10"]);
        assert!(out.contains("status optimal"), "{out}");
        assert!(out.contains("UB 1\n"), "{out}");
        assert!(out.contains("color 1 "), "{out}");
    }
}

#[test]
fn solve_writes_a_report_row() {
    let dir = tempfile::tempdir().unwrap();
    let c5 = write(dir.path(), "c5.selcol", C5);
    let report = dir.path().join("r.csv");
    stdout_of(&["solve", "--instance", &c5, "--method", "cutplane-general", "--report", report.to_str().unwrap()]);
    let text = std::fs::read_to_string(&report).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("instance_id,n,m,density,P,method"));
    let row = lines.next().unwrap();
    assert!(row.starts_with("c5,5,5,0.5,5,cutplane-general,mcs,optimal,3.0,3.0,0.0,"), "{row}");
}

#[test]
fn perfect_mode_on_an_odd_cycle_fails_loudly() {
    let dir = tempfile::tempdir().unwrap();
    let c5 = write(dir.path(), "c5.selcol", C5);
    let out = selcol(&["solve", "--instance", &c5, "--method", "cutplane-perfect"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("not perfect"));
}

#[test]
fn graph_queries() {
    let dir = tempfile::tempdir().unwrap();
    let c5 = write(dir.path(), "c5.selcol", C5);
    let cube = write(dir.path(), "cube.selcol", CUBE);
    assert!(stdout_of(&["clique", "--instance", &c5]).starts_with("size 2\n"));
    assert!(stdout_of(&["color", "--instance", &c5]).starts_with("chromatic_number 3\n"));
    let theta = stdout_of(&["theta", "--instance", &c5]);
    let value: f64 = theta.lines().next().unwrap().strip_prefix("theta ").unwrap().parse().unwrap();
    assert!((value - 5f64.sqrt()).abs() < 1e-3);
    assert!(stdout_of(&["check", "--instance", &c5, "--perfect"]).contains("not perfect: odd hole"));
    assert!(stdout_of(&["check", "--instance", &cube, "--perfect"]).contains("\nperfect\n"));
    assert!(stdout_of(&["oracle", "--instance", &cube]).starts_with("selective_chromatic_number 1\n"));
}

#[test]
fn parse_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.selcol", "p selcol 5 0 1\nk 1 1 2 3 4\n");
    let out = selcol(&["clique", "--instance", &bad]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1: vertex 5 unassigned"));
}

#[test]
fn gen_then_partition_then_solve() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("gen");
    let listing = stdout_of(&[
        "gen", "--n", "14", "--density", "0.3", "--seed", "4", "--count", "2", "--out", out_dir.to_str().unwrap(),
        "--min", "2", "--max", "3",
    ]);
    let files: Vec<&str> = listing.lines().map(|l| l.split(' ').next().unwrap()).collect();
    assert_eq!(files.len(), 2);
    for f in &files {
        assert!(stdout_of(&["check", "--instance", f, "--perfect"]).contains("\nperfect\n"));
        let oracle = stdout_of(&["oracle", "--instance", f]);
        let solved = stdout_of(&["solve", "--instance", f]);
        let best = oracle.lines().next().unwrap().rsplit(' ').next().unwrap();
        assert!(solved.contains(&format!("UB {best}\n")), "{solved} vs {oracle}");
    }
    let parted = stdout_of(&["partition", "--instance", files[0], "--min", "3", "--max", "4", "--seed", "9"]);
    let p: usize = parted.lines().next().unwrap().split(' ').nth(4).unwrap().parse().unwrap();
    assert!((3..=4).contains(&p), "{parted}");
    assert_eq!(parted.lines().filter(|l| l.starts_with("k ")).count(), p);
}

#[test]
fn gen_is_deterministic_and_defaults_to_singletons() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        stdout_of(&["gen", "--n", "10", "--density", "0.5", "--seed", "1", "--out", d.to_str().unwrap()]);
    }
    let name = "perfect-n10-d0.5-s1.selcol";
    let ta = std::fs::read_to_string(a.join(name)).unwrap();
    assert_eq!(ta, std::fs::read_to_string(b.join(name)).unwrap());
    assert!(ta.starts_with("p selcol 10 "));
    assert_eq!(ta.lines().filter(|l| l.starts_with("k ")).count(), 10);
}

#[test]
fn bench_prints_a_summary_and_writes_rows() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bench.csv");
    let out = stdout_of(&[
        "bench", "--n", "10", "--density", "0.3,0.5", "--replicates", "2", "--methods", "ip,cutplane-general",
        "--time-limit", "30", "--out", csv.to_str().unwrap(),
    ]);
    assert!(out.contains("cutplane-general"), "{out}");
    assert!(out.contains("8 rows written"), "{out}");
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 9);
}

#[test]
fn bench_respects_thread_override() {
    let dir = tempfile::tempdir().unwrap();
    let cube = write(dir.path(), "cube.selcol", CUBE);
    let c5 = write(dir.path(), "c5.selcol", C5);
    let out = Command::new(env!("CARGO_BIN_EXE_selcol"))
        .args(["bench", "--instances", &cube, &c5, "--methods", "cutplane-general", "--time-limit", "10"])
        .env("SELCOL_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.contains("cutplane-general")).count(), 2, "{text}");
}
