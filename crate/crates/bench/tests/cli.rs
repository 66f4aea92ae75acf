use std::path::Path;
use std::process::{Command, Output};

use albench::dataset::load_csv;
use albench::runtime::RuntimeResult;

fn albench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_albench")).args(args).output().expect("binary runs")
}

fn synth(dir: &Path, rows: usize, kind: &str) -> String {
    let path = dir.join(format!("{kind}.csv"));
    let p = path.to_str().unwrap().to_string();
    let out = albench(&["synth", "--kind", kind, "--rows", &rows.to_string(), "--output", &p]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    p
}

#[test]
fn synth_then_curve() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth(dir.path(), 100, "two-gaussians");
    assert_eq!(load_csv(&data).unwrap().rows(), 100);

    let out_path = dir.path().join("curve.csv");
    let out = albench(&[
        "curve", "--dataset", &data, "--strategy", "least_confident", "--initial", "6", "--queries", "5",
        "--seed", "2", "--output", out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# config:"));
    assert_eq!(lines[1], "step,labeled,accuracy,seconds");
    assert_eq!(lines.len(), 2 + 6);
    for (k, line) in lines[2..].iter().enumerate() {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[0].parse::<usize>().unwrap(), k);
        assert_eq!(f[1].parse::<usize>().unwrap(), 6 + k);
        let acc: f64 = f[2].parse().unwrap();
        assert!((0.0..=1.0).contains(&acc));
    }
}

#[test]
fn curve_writes_to_stdout_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth(dir.path(), 60, "two-gaussians");
    let out = albench(&["curve", "--dataset", &data, "--strategy", "random", "--initial", "4", "--queries", "3"]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 2 + 4);
}

#[test]
fn multilabel_curve() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth(dir.path(), 80, "quadrants");
    let out = albench(&[
        "curve", "--dataset", &data, "--strategy", "mean_max_loss", "--estimator", "logistic_ovr", "--initial",
        "12", "--queries", "3",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn runtime_csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth(dir.path(), 80, "two-gaussians");
    let out_path = dir.path().join("rt.csv");
    let out = albench(&[
        "runtime", "--dataset", &data, "--strategies", "least_confident,random", "--repeats", "2", "--queries",
        "3", "--output", out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let parsed = RuntimeResult::parse_csv(std::fs::File::open(&out_path).unwrap()).unwrap();
    assert_eq!(parsed.rows.len(), 2);
    let lc = parsed.get("least_confident").unwrap();
    assert_eq!((lc.repeats, lc.queries), (2, 3));
    assert!(lc.mean_s >= 0.0 && lc.std_s >= 0.0);
}

#[test]
fn usage_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth(dir.path(), 60, "two-gaussians");
    let out = albench(&["curve", "--dataset", &data, "--strategy", "nope"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("least_confident") && err.contains("eer_log"), "{err}");

    let out = albench(&["curve", "--dataset", &data, "--strategy", "margin", "--estimator", "svm"]);
    assert_eq!(out.status.code(), Some(1));

    let out = albench(&["curve", "--dataset", &data, "--strategy", "margin", "--queries", "500"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("pool exhausted"));

    assert_eq!(albench(&["curve"]).status.code(), Some(1));
    assert_eq!(albench(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(albench(&["--help"]).status.code(), Some(0));
}

#[test]
fn bad_data_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "f1,f2,label\n1,2,0\n1,oops,1\n").unwrap();
    let out = albench(&["curve", "--dataset", bad.to_str().unwrap(), "--strategy", "margin"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let missing = dir.path().join("missing.csv");
    let out = albench(&["runtime", "--dataset", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
