use std::path::Path;
use std::process::{Command, Output};

use densest::bench::{read_csv, BenchRecord, Cell};

fn densest(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_densest"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const TRIANGLE: &str = "1 2\n2 3\n1 3\n";

const K4_TAIL_MTX: &str = "%%MatrixMarket matrix coordinate pattern symmetric\n\
    % K4 on 1..4 with a tail 4-5-6\n\
    6 6 8\n2 1\n3 1\n4 1\n3 2\n4 2\n4 3\n5 4\n6 5\n";

#[test]
fn peel_text_output() {
    let dir = tempfile::tempdir().unwrap();
    let tri = write(dir.path(), "triangle.el", TRIANGLE);
    let out = densest(&["peel", &tri]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("f_G = 1.0000, |S| = 3\n"));

    let out = densest(&["peel", &tri, "--report-set"]);
    assert!(stdout(&out).contains("S = 1 2 3"));
}

#[test]
fn exact_and_hybrid_on_matrix_market() {
    let dir = tempfile::tempdir().unwrap();
    let mtx = write(dir.path(), "k4tail.mtx", K4_TAIL_MTX);

    let out = densest(&["exact", &mtx, "--report-set"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("f* = 1.5000, |S| = 4\n"), "{text}");
    assert!(text.contains("S = 1 2 3 4"));

    let out = densest(&["hybrid", &mtx, "--out", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let recs = read_csv(out.stdout.as_slice()).unwrap();
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0].problem, "k4tail");
    assert_eq!(recs[0].f_h, Cell::Value(1.5));
    assert_eq!(recs[0].t_e, Cell::NotRun);
}

#[test]
fn json_output_carries_the_set() {
    let dir = tempfile::tempdir().unwrap();
    let mtx = write(dir.path(), "k4tail.mtx", K4_TAIL_MTX);
    let out = densest(&["exact", &mtx, "--out", "json", "--report-set"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["record"]["f_star"], 1.5);
    assert_eq!(v["set"], serde_json::json!([1, 2, 3, 4]));
}

#[test]
fn gen_then_solve() {
    let dir = tempfile::tempdir().unwrap();
    let wc = dir.path().join("wc.el");
    let out = densest(&[
        "gen",
        "worstcase",
        "--t",
        "6",
        "--p",
        "4",
        "--out-file",
        wc.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = densest(&["exact", wc.to_str().unwrap()]);
    assert!(stdout(&out).starts_with("f* = 0.8571, |S| = 7"));
    let out = densest(&["peel", wc.to_str().unwrap()]);
    assert!(stdout(&out).starts_with("f_G = 0.6667, |S| = 15"));

    let out = densest(&[
        "gen",
        "random",
        "--n",
        "30",
        "--m",
        "60",
        "--seed",
        "7",
        "--weights",
        "int:1:3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let again = densest(&[
        "gen",
        "random",
        "--n",
        "30",
        "--m",
        "60",
        "--seed",
        "7",
        "--weights",
        "int:1:3",
    ]);
    assert_eq!(out.stdout, again.stdout);
    assert_eq!(
        stdout(&out).lines().filter(|l| !l.starts_with('#')).count(),
        60
    );

    let out = densest(&["gen", "random", "--n", "4", "--m", "7"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn lp_export_reports_counts() {
    let dir = tempfile::tempdir().unwrap();
    let tri = write(dir.path(), "triangle.el", TRIANGLE);
    let lp = dir.path().join("tri.lp");
    let out = densest(&["lp-export", &tri, "--out-file", lp.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8_lossy(&out.stderr).trim(),
        "6 variables, 7 constraints"
    );
    let text = std::fs::read_to_string(lp).unwrap();
    assert!(text.contains("Maximize") && text.trim_end().ends_with("End"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(densest(&["peel", "--nope", "x"]).status.code(), Some(1));
    assert_eq!(densest(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        densest(&["peel", "x.el", "--out", "xml"]).status.code(),
        Some(1)
    );
    assert_eq!(densest(&[]).status.code(), Some(1));
}

#[test]
fn unreadable_input_exits_two() {
    let out = densest(&["peel", "/nonexistent/graph.mtx"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn bench_marks_failures_without_aborting() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "triangle.el", TRIANGLE);
    write(dir.path(), "k4tail.mtx", K4_TAIL_MTX);
    let manifest = write(
        dir.path(),
        "medium.txt",
        "# two real files and a missing one\ntriangle.el\nmissing.mtx\nk4tail.mtx\n",
    );
    let out = densest(&["bench", "--manifest", &manifest, "--jobs", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let text = stdout(&out);
    assert!(text.starts_with("problem,|V|,|E|,T_G,f_G,T_2,T_3,T_H,f_H,T_E,f*\n"));
    let recs = read_csv(out.stdout.as_slice()).unwrap();
    let names: Vec<_> = recs.iter().map(|r| r.problem.as_str()).collect();
    assert_eq!(names, ["triangle", "missing", "k4tail"]);
    assert!(text.contains("missing,--,--,--,--,--,--,--,--,--,--"));
    assert_eq!(recs[2].f_star, Cell::Value(1.5));
    assert!(recs[2].f_g.value().unwrap() <= recs[2].f_h.value().unwrap());
}

#[test]
fn bench_memory_budget_produces_marks() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "k4tail.mtx", K4_TAIL_MTX);
    let manifest = write(dir.path(), "m.txt", "k4tail.mtx\n");
    let out = densest(&["bench", "--manifest", &manifest, "--memory-budget", "64"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).lines().nth(1).unwrap().contains("--"));
}

#[test]
fn json_and_csv_agree() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "k4tail.mtx", K4_TAIL_MTX);
    write(dir.path(), "triangle.el", TRIANGLE);
    let manifest = write(dir.path(), "m.txt", "k4tail.mtx\ntriangle.el\n");
    let csv = densest(&["bench", "--manifest", &manifest, "--out", "csv"]);
    let json = densest(&["bench", "--manifest", &manifest, "--out", "json"]);
    assert_eq!(csv.status.code(), Some(0));
    let from_csv = read_csv(csv.stdout.as_slice()).unwrap();
    let from_json: Vec<BenchRecord> = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(from_csv.len(), from_json.len());
    for (c, j) in from_csv.iter().zip(&from_json) {
        let j = j.table_precision();
        // densities are deterministic; times differ between runs
        assert_eq!((c.n, c.m), (j.n, j.m));
        assert_eq!(c.f_g, j.f_g);
        assert_eq!(c.f_h, j.f_h);
        assert_eq!(c.f_star, j.f_star);
    }
}

#[test]
fn bench_text_table() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "triangle.el", TRIANGLE);
    let manifest = write(dir.path(), "m.txt", "triangle.el\n");
    let out = densest(&[
        "bench",
        "--manifest",
        &manifest,
        "--out",
        "text",
        "--algorithms",
        "greedy,exact",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("problem"));
    let row = lines.next().unwrap();
    assert!(row.starts_with("triangle") && row.contains("1.0000"));
}
