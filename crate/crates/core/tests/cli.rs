use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qevo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qevo-sat"))
        .args(args)
        .output()
        .unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn satisfiable_instance_reports_model() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("f.cnf");
    fs::write(&cnf, "c tiny\np cnf 3 3\n1 2 0\n-1 3 0\n-2 -3 0\n").unwrap();
    let out = qevo(&["solve", p(&cnf)]);
    assert_eq!(out.status.code(), Some(10));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let mut lines = stdout.lines();
    assert_eq!(lines.next(), Some("s SATISFIABLE"));
    let lits: Vec<i64> = lines
        .flat_map(|l| l.strip_prefix("v ").unwrap().split_whitespace())
        .map(|t| t.parse().unwrap())
        .collect();
    assert_eq!(lits.last(), Some(&0));
    let model: Vec<bool> = lits[..lits.len() - 1].iter().map(|&l| l > 0).collect();
    assert_eq!(model.len(), 3);
    assert!((model[0] || model[1]) && (!model[0] || model[2]) && (!model[1] || !model[2]));
}

#[test]
fn zero_budget_is_unknown() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("f.cnf");
    fs::write(&cnf, "p cnf 2 2\n1 0\n-1 2 0\n").unwrap();
    let out = qevo(&["solve", p(&cnf), "--max-cycles", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "s UNKNOWN\n");
}

#[test]
fn malformed_input_fails_without_answer() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("bad.cnf");
    fs::write(&cnf, "p cnf 2 1\n1 x 0\n").unwrap();
    for path in [p(&cnf), "/nonexistent/file.cnf"] {
        let out = qevo(&["solve", path]);
        assert_eq!(out.status.code(), Some(1));
        assert!(!String::from_utf8(out.stdout).unwrap().contains("s "));
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn clause_count_mismatch_is_a_warning() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("f.cnf");
    fs::write(&cnf, "p cnf 2 5\n1 0\n2 0\n").unwrap();
    let out = qevo(&["solve", p(&cnf)]);
    assert_eq!(out.status.code(), Some(10));
    assert!(String::from_utf8(out.stderr).unwrap().contains("warning"));
}

#[test]
fn gen_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let out = qevo(&[
            "gen",
            "-n",
            "15",
            "-m",
            "40",
            "--count",
            "3",
            "--seed",
            "11",
            "-o",
            p(d.path()),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let mut names: Vec<String> = fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["inst_0.cnf", "inst_1.cnf", "inst_2.cnf"]);
    for n in &names {
        assert_eq!(
            fs::read(a.path().join(n)).unwrap(),
            fs::read(b.path().join(n)).unwrap()
        );
    }
}

#[test]
fn gen_rejects_bad_requests() {
    let dir = tempfile::tempdir().unwrap();
    let out = qevo(&["gen", "-n", "2", "-m", "4", "-k", "3", "-o", p(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let out = qevo(&["gen", "-n", "5", "-m", "4", "-o", p(&blocker.join("sub"))]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bench_rows_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = qevo(&[
        "gen",
        "-n",
        "12",
        "--ratio",
        "3",
        "--count",
        "5",
        "-o",
        p(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = qevo(&["bench", p(dir.path()), "--seeds", "1,2,3"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "instance,status,cycles,wall_time_ms,seed");
    assert_eq!(lines.len(), 1 + 15 + 1);
    let summary = lines[16];
    let rate: f64 = summary
        .split(',')
        .find_map(|f| f.strip_prefix("success_rate="))
        .unwrap()
        .parse()
        .unwrap();
    assert!((0.0..=1.0).contains(&rate));

    let empty = tempfile::tempdir().unwrap();
    assert_eq!(qevo(&["bench", p(empty.path())]).status.code(), Some(1));
}
