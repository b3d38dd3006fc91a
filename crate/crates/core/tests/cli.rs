use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use missing_mass::cli::{read_sweep_csv, write_sweep_csv};
use serde_json::Value;
use tempfile::TempDir;

fn mmvar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mmvar")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("one JSON object")
}

fn num(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("{key} missing in {v}"))
}

fn dist_file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn variance_command() {
    let dir = TempDir::new().unwrap();
    let coin = dist_file(&dir, "coin.txt", "0.5\n0.5\n");
    let v = json(&mmvar(&["variance", "--dist", s(&coin), "--n", "2", "--method", "exact"]));
    assert_eq!(v["method"], "exact");
    assert_eq!(v["n"], 2);
    assert!((num(&v, "value") - 0.0625).abs() < 1e-15);

    let point = dist_file(&dir, "point.txt", "1.0\n");
    let v = json(&mmvar(&["variance", "--dist", s(&point), "--n", "5", "--method", "thm1"]));
    assert_eq!(num(&v, "value"), 0.0);

    let bad = dist_file(&dir, "bad.txt", "0.5\n0.6\n");
    let out = mmvar(&["variance", "--dist", s(&bad), "--n", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("NOT_NORMALIZED"));
}

#[test]
fn variance_csv_format() {
    let dir = TempDir::new().unwrap();
    let coin = dist_file(&dir, "coin.txt", "0.5\n0.5\n");
    let out = mmvar(&["variance", "--dist", s(&coin), "--n", "2", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "method,n,value\nexact,2,0.062500000000000000\n");
}

#[test]
fn maximize_command() {
    let v = json(&mmvar(&["maximize", "--n", "1000", "--m", "inf"]));
    assert!((num(&v, "alpha") - 0.477).abs() < 1e-3);
    assert_eq!(v["regime"], "UNIFORM");
    assert_eq!(v["atom_count"], 441);
    assert!((num(&v, "variance_estimate") - num(&v, "alpha") / 1000.0).abs() < 1e-18);

    let v = json(&mmvar(&["maximize", "--n", "100", "--m", "20"]));
    assert_eq!(v["regime"], "UNIFORM_DIRAC");
    assert!((num(&v, "w") - 0.61).abs() < 0.01);

    assert_eq!(mmvar(&["maximize", "--n", "100", "--m", "1"]).status.code(), Some(2));
    assert_eq!(mmvar(&["maximize", "--n", "100", "--m", "lots"]).status.code(), Some(2));
    assert_eq!(mmvar(&["maximize", "--n", "0", "--m", "inf"]).status.code(), Some(2));
}

#[test]
fn sweep_command() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("sweep.csv");
    let status = mmvar(&["sweep", "--b-min", "0.05", "--b-max", "0.9", "--steps", "100", "--out", s(&out)]);
    assert_eq!(status.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("b,val\n"));
    assert!(!text.contains('\r'));
    let rows = read_sweep_csv(text.as_bytes()).unwrap();
    assert_eq!(rows.len(), 100);
    for w in rows.windows(2) {
        assert!(w[1].val >= w[0].val);
    }
    let plateau: Vec<f64> = rows.iter().filter(|r| r.b >= 0.4420).map(|r| r.val).collect();
    assert!(!plateau.is_empty());
    for v in &plateau {
        assert!((v - plateau[0]).abs() <= 1e-6 && (v - 0.477).abs() <= 1e-3);
    }
    assert!(rows.iter().all(|r| r.val >= 0.0 && r.val <= 0.478));

    let two = mmvar(&["sweep", "--b-min", "0.5", "--b-max", "0.9", "--steps", "2"]);
    let rows = read_sweep_csv(&two.stdout[..]).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].val, rows[1].val);

    let geo = mmvar(&["sweep", "--b-min", "0.01", "--b-max", "1", "--steps", "3", "--spacing", "geometric"]);
    let rows = read_sweep_csv(&geo.stdout[..]).unwrap();
    assert!((rows[1].b - 0.1).abs() < 1e-12);

    assert_eq!(mmvar(&["sweep", "--b-min", "0", "--b-max", "0.9", "--steps", "5"]).status.code(), Some(2));
    assert_eq!(mmvar(&["sweep", "--b-min", "0.5", "--b-max", "0.4", "--steps", "5"]).status.code(), Some(2));
    assert_eq!(mmvar(&["sweep", "--b-min", "0.1", "--b-max", "0.4", "--steps", "1"]).status.code(), Some(2));
}

#[test]
fn sweep_csv_round_trips_byte_for_byte() {
    let out = mmvar(&["sweep", "--b-min", "0.05", "--b-max", "0.9", "--steps", "37", "--spacing", "geometric"]);
    let rows = read_sweep_csv(&out.stdout[..]).unwrap();
    let mut again = Vec::new();
    write_sweep_csv(&rows, &mut again).unwrap();
    assert_eq!(again, out.stdout);
}

#[test]
fn landscape_command() {
    let out = mmvar(&["landscape", "--c-max", "5", "--grid", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let mut reader = csv::Reader::from_reader(&out.stdout[..]);
    assert_eq!(reader.headers().unwrap(), vec!["w", "c", "alpha"]);
    let rows: Vec<[f64; 3]> = reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            [r[0].parse().unwrap(), r[1].parse().unwrap(), r[2].parse().unwrap()]
        })
        .collect();
    assert_eq!(rows.len(), 50 * 50);
    assert!(rows.iter().filter(|r| r[0] == 0.0).all(|r| r[2] == 0.0));
    let best = rows.iter().max_by(|a, b| a[2].total_cmp(&b[2])).unwrap();
    let nearest = rows
        .iter()
        .min_by(|a, b| {
            let da = (a[0] - 1.0).powi(2) + (a[1] - 2.26).powi(2);
            let db = (b[0] - 1.0).powi(2) + (b[1] - 2.26).powi(2);
            da.total_cmp(&db)
        })
        .unwrap();
    assert_eq!(best, nearest);
    assert!(rows.iter().all(|r| r[1] > 0.0 && r[1] <= 5.0 && (0.0..=1.0).contains(&r[0])));

    assert_eq!(mmvar(&["landscape", "--c-max", "0", "--grid", "5"]).status.code(), Some(2));
    assert_eq!(mmvar(&["landscape", "--c-max", "5", "--grid", "1"]).status.code(), Some(2));
}

#[test]
fn simulate_command() {
    let dir = TempDir::new().unwrap();
    let point = dist_file(&dir, "point.txt", "1.0\n");
    let v = json(&mmvar(&["simulate", "--dist", s(&point), "--n", "5", "--trials", "100"]));
    assert_eq!(num(&v, "variance"), 0.0);
    assert_eq!(v["seed"], 0);

    let coin = dist_file(&dir, "coin.txt", "0.5\n0.5\n");
    let args = ["simulate", "--dist", s(&coin), "--n", "2", "--trials", "100000", "--seed", "5"];
    let first = mmvar(&args);
    let v = json(&first);
    assert!((num(&v, "variance") - 0.0625).abs() <= 3.0 * num(&v, "se_variance"));
    assert_eq!(first.stdout, mmvar(&args).stdout);
    let mut threaded = args.to_vec();
    threaded.extend(["--threads", "3"]);
    assert_eq!(first.stdout, mmvar(&threaded).stdout);

    assert_eq!(mmvar(&["simulate", "--dist", s(&coin), "--n", "2", "--trials", "1"]).status.code(), Some(2));
}

#[test]
fn gap_command() {
    let dir = TempDir::new().unwrap();
    let point = dist_file(&dir, "point.txt", "1.0\n");
    let v = json(&mmvar(&["gap", "--dist", s(&point), "--n", "5"]));
    for k in ["true_variance", "subgamma_v", "iid_major_v", "gap_subgamma", "gap_iid"] {
        assert_eq!(num(&v, k), 0.0, "{k}");
    }
    let coin = dist_file(&dir, "coin.txt", "0.5\n0.5\n");
    let v = json(&mmvar(&["gap", "--dist", s(&coin), "--n", "2", "--mode", "exact"]));
    assert!((num(&v, "gap_iid") - 0.03125).abs() < 1e-15);

    let u10 = dist_file(&dir, "u10.txt", &"0.1\n".repeat(10));
    let v = json(&mmvar(&["gap", "--dist", s(&u10), "--n", "10", "--mode", "exact"]));
    assert!(num(&v, "gap_iid") > 0.0);
}

#[test]
fn exit_statuses() {
    let dir = TempDir::new().unwrap();
    let big = dist_file(&dir, "big.txt", &"0.00004\n".repeat(25_000));
    let out = mmvar(&["variance", "--dist", s(&big), "--n", "10", "--method", "exact"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("TOO_LARGE"));
    assert_eq!(mmvar(&["gap", "--dist", s(&big), "--n", "10"]).status.code(), Some(3));
    assert_eq!(mmvar(&["variance", "--dist", s(&big), "--n", "10", "--method", "poisson"]).status.code(), Some(0));

    let missing = dir.path().join("nope.txt");
    assert_eq!(mmvar(&["variance", "--dist", s(&missing), "--n", "2"]).status.code(), Some(2));
    let blank = dist_file(&dir, "blank.txt", "0.5\n\n0.5\n");
    assert_eq!(mmvar(&["variance", "--dist", s(&blank), "--n", "2"]).status.code(), Some(2));

    let unwritable = dir.path().join("no/such/dir/out.csv");
    let out = mmvar(&["sweep", "--b-min", "0.1", "--b-max", "0.5", "--steps", "3", "--out", s(&unwritable)]);
    assert_eq!(out.status.code(), Some(4));
    let out = mmvar(&["maximize", "--n", "10", "--m", "inf", "--out", s(&unwritable)]);
    assert_eq!(out.status.code(), Some(4));

    assert_eq!(mmvar(&["bogus"]).status.code(), Some(2));
    assert_eq!(mmvar(&["variance"]).status.code(), Some(2));
    assert_eq!(mmvar(&["--help"]).status.code(), Some(0));
}

#[test]
fn out_flag_writes_same_bytes_as_stdout() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("rec.json");
    let direct = mmvar(&["maximize", "--n", "100", "--m", "20"]);
    assert_eq!(mmvar(&["maximize", "--n", "100", "--m", "20", "--out", s(&path)]).status.code(), Some(0));
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
}
