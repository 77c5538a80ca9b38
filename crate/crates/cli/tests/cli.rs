use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn perisplit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_perisplit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn two_clusters(dir: &TempDir) -> PathBuf {
    let path = dir.path().join("two.csv");
    fs::write(
        &path,
        "x,y\n0,0\n1,0\n1,1\n0,1\n0.5,0.5\n100,0\n101,0\n101,1\n100,1\n100.5,0.5\n",
    )
    .unwrap();
    path
}

fn solve(input: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["solve", "--input", s(input), "--output", s(out)];
    args.extend_from_slice(extra);
    perisplit(&args)
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn solve_exact_two_clusters() {
    let dir = TempDir::new().unwrap();
    let input = two_clusters(&dir);
    let out = dir.path().join("r.json");
    let o = solve(&input, &out, &["--algo", "exact"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = read_json(&out);
    assert!((r["cost"].as_f64().unwrap() - 8.0).abs() < 1e-12);
    assert_eq!(r["left_ids"], serde_json::json!([0, 1, 2, 3, 4]));
    assert_eq!(r["right_ids"], serde_json::json!([5, 6, 7, 8, 9]));
    for key in ["per_left", "per_right", "provenance", "config"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
    assert!(r["timings"]["branch_ms"]["total"].as_f64().is_some());
    assert_eq!(r["config"]["algo"], "exact");
}

#[test]
fn solve_approx_within_bound() {
    let dir = TempDir::new().unwrap();
    let input = two_clusters(&dir);
    let out = dir.path().join("r.json");
    let o = solve(&input, &out, &["--algo", "approx", "--eps", "0.1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(read_json(&out)["cost"].as_f64().unwrap() <= 8.8);
}

#[test]
fn solve_accepts_json_input_and_writes_svg() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("p.json");
    fs::write(
        &input,
        r#"{"points":[[0,0],[1,0],[0,1],[9,9],[10,9],[9,10]]}"#,
    )
    .unwrap();
    let out = dir.path().join("r.json");
    let svg = dir.path().join("r.svg");
    let o = solve(&input, &out, &["--algo", "oracle", "--svg", s(&svg)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(read_json(&out)["left_ids"], serde_json::json!([0, 1, 2]));
    assert_eq!(
        fs::read_to_string(&svg)
            .unwrap()
            .matches("<polygon")
            .count(),
        2
    );
}

#[test]
fn oracle_refuses_large_input() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("big.csv");
    let g = perisplit(&[
        "gen",
        "--dist",
        "uniform",
        "--n",
        "2000",
        "--seed",
        "1",
        "--out",
        s(&input),
    ]);
    assert_eq!(code(&g), 0);
    let o = solve(&input, &dir.path().join("r.json"), &["--algo", "oracle"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("OracleTooLarge"), "{}", stderr(&o));
}

#[test]
fn malformed_input_reports_line() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("bad.csv");
    fs::write(&input, "x,y\n0,0\n1,1\n2,zz\n").unwrap();
    let o = solve(&input, &dir.path().join("r.json"), &[]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(code(&perisplit(&[])), 64);
    assert_eq!(code(&perisplit(&["solve", "--algo", "exact"])), 64);
    assert_eq!(code(&perisplit(&["frobnicate"])), 64);
    assert_eq!(code(&perisplit(&["--help"])), 0);
    let dir = TempDir::new().unwrap();
    let input = two_clusters(&dir);
    let o = solve(&input, &dir.path().join("r.json"), &["--grid", "2"]);
    assert_eq!(code(&o), 64);
}

#[test]
fn gen_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = perisplit(&[
            "gen",
            "--dist",
            "clusters",
            "--n",
            "8",
            "--seed",
            "1",
            "--out",
            s(p),
        ]);
        assert_eq!(code(&o), 0);
    }
    let text = fs::read(&a).unwrap();
    assert_eq!(text, fs::read(&b).unwrap());
    let lines: Vec<&str> = std::str::from_utf8(&text).unwrap().lines().collect();
    assert_eq!(lines[0], "x,y");
    assert_eq!(lines.len(), 9);
    for l in &lines[1..] {
        let v: Vec<f64> = l.split(',').map(|t| t.parse().unwrap()).collect();
        assert_eq!(v.len(), 2);
    }
}

#[test]
fn gen_circle_on_unit_circle() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("c.csv");
    let o = perisplit(&[
        "gen",
        "--dist",
        "circle",
        "--n",
        "100",
        "--seed",
        "4",
        "--out",
        s(&p),
    ]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(&p).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 100);
    for l in rows {
        let (x, y) = l.split_once(',').unwrap();
        let (x, y): (f64, f64) = (x.parse().unwrap(), y.parse().unwrap());
        assert!((x.hypot(y) - 1.0).abs() < 1e-9);
    }
}

#[test]
fn bench_writes_rows_and_slopes() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("bench.csv");
    let o = perisplit(&[
        "bench",
        "--algos",
        "exact,oracle",
        "--sizes",
        "16,32",
        "--seeds",
        "2",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("algo,n,seed,wall_ms,cost"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 8);
    for pair in rows.chunks(2) {
        let (a, b): (f64, f64) = (pair[0][4].parse().unwrap(), pair[1][4].parse().unwrap());
        assert!((a - b).abs() <= 1e-9 * a.max(b));
    }
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("slope exact"));
    assert!(stdout.contains("slope oracle"));
}

#[test]
fn bench_without_sizes_is_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("bench.csv");
    assert_eq!(code(&perisplit(&["bench", "--out", s(&out)])), 64);
    assert_eq!(
        code(&perisplit(&["bench", "--sizes", "", "--out", s(&out)])),
        64
    );
}

#[test]
fn verify_accepts_valid_and_rejects_tampered() {
    let dir = TempDir::new().unwrap();
    let input = two_clusters(&dir);
    let out = dir.path().join("r.json");
    assert_eq!(code(&solve(&input, &out, &[])), 0);
    let v = perisplit(&[
        "verify",
        "--input",
        s(&input),
        "--result",
        s(&out),
        "--against",
        "oracle",
        "--separation",
    ]);
    assert_eq!(code(&v), 0, "{}", stderr(&v));
    let report = String::from_utf8_lossy(&v.stdout);
    assert!(report.contains("satisfied true"), "{report}");

    let mut r = read_json(&out);
    r["cost"] = serde_json::json!(7.5);
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r.to_string()).unwrap();
    let v = perisplit(&["verify", "--input", s(&input), "--result", s(&bad)]);
    assert_eq!(code(&v), 1);
    assert!(stderr(&v).contains("CostMismatch"));

    let mut r = read_json(&out);
    r["right_ids"] = serde_json::json!([5, 6, 7, 8]);
    fs::write(&bad, r.to_string()).unwrap();
    let v = perisplit(&["verify", "--input", s(&input), "--result", s(&bad)]);
    assert_eq!(code(&v), 1);
    assert!(stderr(&v).contains("MissingId"));
}

#[test]
fn verify_reports_oracle_mismatch() {
    let dir = TempDir::new().unwrap();
    let input = two_clusters(&dir);
    // Swap (100,0) and (0.5,0.5) between the clusters.
    let left = 100.0 + 99f64.hypot(1.0) + 2.0;
    let right = 100.5f64.hypot(0.5) + 2.0 + 99.5f64.hypot(0.5);
    let r = serde_json::json!({
        "cost": left + right,
        "left_ids": [0, 1, 2, 3, 5],
        "right_ids": [4, 6, 7, 8, 9],
    });
    let path = dir.path().join("r.json");
    fs::write(&path, r.to_string()).unwrap();
    let v = perisplit(&[
        "verify",
        "--input",
        s(&input),
        "--result",
        s(&path),
        "--against",
        "oracle",
    ]);
    assert_eq!(code(&v), 2, "{}", stderr(&v));
    let err = stderr(&v);
    assert!(err.contains("oracle cost 8"), "{err}");
    assert!(err.contains("result cost 40"), "{err}");
}

#[test]
fn render_two_clusters() {
    let dir = TempDir::new().unwrap();
    let input = two_clusters(&dir);
    let out = dir.path().join("r.json");
    assert_eq!(code(&solve(&input, &out, &[])), 0);
    let svg = dir.path().join("r.svg");
    let o = perisplit(&[
        "render",
        "--input",
        s(&input),
        "--result",
        s(&out),
        "--out",
        s(&svg),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let doc = fs::read_to_string(&svg).unwrap();
    assert_eq!(doc.matches("<polygon").count(), 2);
    let vb: Vec<f64> = doc
        .split("viewBox=\"")
        .nth(1)
        .and_then(|t| t.split('"').next())
        .unwrap()
        .split(' ')
        .map(|t| t.parse().unwrap())
        .collect();
    for (got, want) in vb.iter().zip([-5.05, -1.05, 111.1, 1.1]) {
        assert!((got - want).abs() < 1e-12, "{vb:?}");
    }
}

#[test]
fn render_quadtree_overlay() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("three.csv");
    fs::write(&input, "0,0\n1,1\n4,4\n").unwrap();
    let result = dir.path().join("r.json");
    fs::write(
        &result,
        r#"{"cost":2.8284271247461903,"left_ids":[0,1],"right_ids":[2]}"#,
    )
    .unwrap();
    let svg = dir.path().join("q.svg");
    let o = perisplit(&[
        "render",
        "--input",
        s(&input),
        "--result",
        s(&result),
        "--out",
        s(&svg),
        "--quadtree",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let doc = fs::read_to_string(&svg).unwrap();
    // Root [-2,6]², SW quadrant [-2,2]² shrinking to [0,2]², NE quadrant [2,6]²,
    // and the two unit leaves inside [0,2]².
    for sq in [
        r#"x="-2" y="-6" width="8""#,
        r#"x="-2" y="-2" width="4""#,
        r#"x="0" y="-2" width="2""#,
        r#"x="2" y="-6" width="4""#,
        r#"x="0" y="-1" width="1""#,
        r#"x="1" y="-2" width="1""#,
    ] {
        assert!(doc.contains(sq), "missing {sq}\n{doc}");
    }
}

#[test]
fn render_empty_result_is_usage_error() {
    let dir = TempDir::new().unwrap();
    let input = two_clusters(&dir);
    let result = dir.path().join("empty.json");
    fs::write(&result, "").unwrap();
    let o = perisplit(&[
        "render",
        "--input",
        s(&input),
        "--result",
        s(&result),
        "--out",
        s(&dir.path().join("o.svg")),
    ]);
    assert_eq!(code(&o), 64);
}

#[test]
fn round_trip_all_generators_and_algos() {
    let dir = TempDir::new().unwrap();
    for dist in ["uniform", "clusters", "circle", "gaussians"] {
        let input = dir.path().join(format!("{dist}.csv"));
        let g = perisplit(&[
            "gen",
            "--dist",
            dist,
            "--n",
            "24",
            "--seed",
            "7",
            "--out",
            s(&input),
        ]);
        assert_eq!(code(&g), 0);
        for algo in ["exact", "approx", "oracle"] {
            let out = dir.path().join(format!("{dist}-{algo}.json"));
            let o = solve(&input, &out, &["--algo", algo]);
            assert_eq!(code(&o), 0, "{dist} {algo}: {}", stderr(&o));
            let v = perisplit(&["verify", "--input", s(&input), "--result", s(&out)]);
            assert_eq!(code(&v), 0, "{dist} {algo}: {}", stderr(&v));
        }
    }
}
