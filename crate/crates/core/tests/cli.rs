use std::path::Path;
use std::process::{Command, Output};

use corrcoef::io::{Cell, OutputRecord};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_corrcoef")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn field(out: &str, name: &str) -> String {
    out.lines()
        .find_map(|l| l.strip_prefix(name).map(|v| v.trim().to_string()))
        .unwrap_or_else(|| panic!("{name} missing in {out}"))
}

#[test]
fn analyze_four_points() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "d.csv", "x,y\n1,3\n2,1\n3,2\n4,4\n");
    let o = run(&["analyze", &path]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(field(&out, "n"), "4");
    assert_eq!(field(&out, "pearson"), "0.4000");
    assert_eq!(field(&out, "kendall"), "0.3333");
    assert_eq!(field(&out, "spearman"), "0.4000");
    assert_eq!(field(&out, "r "), "0.3000");
}

#[test]
fn analyze_monotone_columns() {
    let dir = tempfile::tempdir().unwrap();
    let same = write(dir.path(), "same.csv", "0.5,0.5\n1.5,1.5\n-2,-2\n7,7\r\n");
    let out = stdout(&run(&["analyze", "--no-header", &same]));
    for name in ["pearson", "spearman", "kendall", "r "] {
        assert_eq!(field(&out, name), "1.0000");
    }
    let reversed = write(dir.path(), "rev.csv", "a,b\n1,4\n2,3\n3,2\n4,1\n");
    let out = stdout(&run(&["analyze", &reversed]));
    for name in ["pearson", "spearman", "kendall", "r "] {
        assert_eq!(field(&out, name), "-1.0000");
    }
}

#[test]
fn analyze_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["analyze", "/nonexistent/file.csv"]).status.code(), Some(2));
    let garbage = write(dir.path(), "g.csv", "x,y\n1,abc\n");
    assert_eq!(run(&["analyze", &garbage]).status.code(), Some(2));
    let wide = write(dir.path(), "w.csv", "1,2,3\n4,5,6\n");
    assert_eq!(run(&["analyze", "--no-header", &wide]).status.code(), Some(2));
    let empty = write(dir.path(), "e.csv", "");
    assert_eq!(run(&["analyze", &empty]).status.code(), Some(2));
    let single = write(dir.path(), "s.csv", "x,y\n1,2\n");
    assert_eq!(run(&["analyze", &single]).status.code(), Some(2));
    let binary = dir.path().join("b.csv");
    std::fs::write(&binary, [0xff, 0xfe, 0x00, 0x2c, 0x0a]).unwrap();
    assert_eq!(run(&["analyze", binary.to_str().unwrap()]).status.code(), Some(2));

    let tie = write(dir.path(), "t.csv", "x,y\n1,2\n1,3\n2,4\n");
    let o = run(&["analyze", &tie]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("tied x values"));
    let flat = write(dir.path(), "f.csv", "x,y\n1,2\n2,2\n3,2\n");
    assert_eq!(run(&["analyze", &flat]).status.code(), Some(4));
}

#[test]
fn theory_rows() {
    let out = stdout(&run(&["theory", "normal", "--t", "0.1", "--t", "0", "--t", "-0.7"]));
    let rows: Vec<Vec<&str>> = out.lines().skip(1).map(|l| l.split_whitespace().collect()).collect();
    assert_eq!(rows[0][1..], ["0.1000", "0.0955", "0.0638", "0.0479"]);
    assert_eq!(rows[1][1..], ["0.0000"; 4]);
    assert_eq!(rows[2][1..], ["-0.7000", "-0.6829", "-0.4936", "-0.3990"]);

    let out = stdout(&run(&["theory", "pareto", "--t", "10", "--t", "1"]));
    let rows: Vec<Vec<&str>> = out.lines().skip(1).map(|l| l.split_whitespace().collect()).collect();
    assert_eq!(rows[0][1..], ["0.1000", "0.0714", "0.0476", "0.0358"]);
    assert_eq!(rows[1][1], "--");
}

#[test]
fn theory_rejects_bad_input() {
    assert_eq!(run(&["theory", "normal", "--t", "1.5"]).status.code(), Some(2));
    assert_eq!(run(&["theory", "cauchy", "--t", "1"]).status.code(), Some(2));
    assert_eq!(run(&["theory", "normal"]).status.code(), Some(2));
    assert_eq!(run(&["theory", "pareto", "--t", "abc"]).status.code(), Some(2));
    assert_eq!(run(&["simulate", "normal", "--t", "0.5", "--n", "1"]).status.code(), Some(2));
    assert_eq!(run(&["simulate", "normal"]).status.code(), Some(2));
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
}

#[test]
fn theory_json_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.json");
    let o = run(&["theory", "exp-pareto", "--t", "1", "--t", "5", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(v["rows"][0]["pearson"].is_null());
    assert!((v["rows"][1]["pearson"].as_f64().unwrap() + 0.430_331).abs() < 1e-6);
}

#[test]
fn simulate_is_deterministic_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<String> = ["a.csv", "b.csv", "a.json", "b.json"]
        .iter()
        .map(|n| dir.path().join(n).to_str().unwrap().to_string())
        .collect();
    for p in &paths {
        let o = run(&["simulate", "normal", "--t", "-0.7", "--t", "0.3", "--n", "200", "--reps", "50", "--seed", "42", "--out", p]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let read = |p: &String| std::fs::read(p).unwrap();
    assert_eq!(read(&paths[0]), read(&paths[1]));
    assert_eq!(read(&paths[2]), read(&paths[3]));

    let csv = OutputRecord::from_csv(&std::fs::read_to_string(&paths[0]).unwrap()).unwrap();
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&paths[2]).unwrap()).unwrap();
    assert!(csv.config.contains(&("seed".to_string(), "42".to_string())));
    assert_eq!(csv.rows.len(), 2);
    for (i, row) in csv.rows.iter().enumerate() {
        for (col, cell) in csv.columns.iter().zip(row) {
            let Cell::Num(v) = cell else { panic!("{col}: {cell:?}") };
            assert_eq!(json["rows"][i][col].as_f64().unwrap(), *v, "{col}");
        }
    }
}

#[test]
fn simulate_family_flag_and_seed_echo() {
    let o = run(&["simulate", "--family", "fgm", "--t", "0.5", "--n", "50", "--reps", "20"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let seed: u64 = field(&out, "seed").parse().unwrap();
    let again = stdout(&run(&["simulate", "fgm", "--t", "0.5", "--n", "50", "--reps", "20", "--seed", &seed.to_string()]));
    assert_eq!(out.lines().skip(1).collect::<Vec<_>>(), again.lines().collect::<Vec<_>>());
}

#[test]
fn simulate_modes() {
    let out = stdout(&run(&["simulate", "pareto", "--t", "0.5", "--extend-pearson", "--seed", "1"]));
    assert!(out.contains("trend-following"), "{out}");
    let rho: f64 = field(&out, "rho_tilde =").split_whitespace().next().unwrap().parse().unwrap();
    assert!((rho - 0.7972).abs() < 0.03, "{rho}");

    let out = stdout(&run(&["simulate", "normal", "--t", "0.7", "--bias", "--reps", "2000", "--seed", "1"]));
    assert_eq!(out.lines().count(), 7);

    let out = stdout(&run(&["simulate", "normal", "--t", "-0.99", "--meta", "10", "--reps", "5", "--seed", "1"]));
    assert_eq!(out.lines().count(), 19);

    let o = run(&["simulate", "normal", "--t", "-0.99", "--contaminate", "5", "--n", "300", "--reps", "20", "--seed", "1"]);
    assert!(o.status.success());
    assert_eq!(
        run(&["simulate", "normal", "--t", "0.5", "--bias", "--meta", "10"]).status.code(),
        Some(2)
    );
}

#[test]
fn simulate_reports_replicate_failure() {
    // Pareto draws overflow to infinity for tiny t, so every replicate fails.
    let o = run(&["simulate", "pareto", "--t", "0.001", "--n", "50", "--reps", "20", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(5));
}
