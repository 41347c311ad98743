use std::process::{Command, Output};

fn flatspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flatspec"))
        .args(args)
        .env_remove("FLATSPEC_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(stdout(o).trim()).expect("one JSON line")
}

#[test]
fn bell_prints_sorted_monomials() {
    let o = flatspec(&["bell", "4", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "3 * x2^2\n4 * x1^1 x3^1\n");
    let o = flatspec(&["bell", "0", "0"]);
    assert_eq!(stdout(&o), "1\n");
    let o = flatspec(&["bell", "3", "5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn classify_point_spectrum() {
    let o = flatspec(&["classify", "--op", "mv:-2", "--lambda", "1,0"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["verdict"], "PointSpectrum");
    assert!(v["eigenfunction"].is_string());
}

#[test]
fn classify_other_verdicts() {
    let v = json(&flatspec(&["classify", "--op", "mv:-2", "--lambda", "-1,0.5"]));
    assert_eq!(v["verdict"], "ResolventSet");
    let v = json(&flatspec(&["classify", "--op", "cesaro", "--lambda", "0,0"]));
    assert_eq!(v["verdict"], "WaelbroeckOnly");
    let v = json(&flatspec(&["classify", "--op", "mult", "--p", "-2", "--lambda", "2,0"]));
    assert_eq!(v["verdict"], "InSpectrum");
    let v = json(&flatspec(&["classify", "--op", "mult:1", "--lambda", "2,0"]));
    assert_eq!(v["verdict"], "InResolvent");
}

#[test]
fn lambda_is_printed_with_seventeen_digits() {
    let v = json(&flatspec(&["classify", "--op", "md:2", "--lambda", "0.1,-0.3"]));
    assert_eq!(v["lambda"]["re"], "1.0000000000000001e-1");
    assert_eq!(v["lambda"]["im"], "-2.9999999999999999e-1");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["classify", "--op", "nope", "--lambda", "1,0"][..],
        &["classify", "--op", "mv:-2", "--lambda", "1,x"],
        &["resolve", "--op", "mv:0", "--lambda", "1,0", "--g", "unknown"],
        &["resolve", "--op", "mv:-2", "--lambda", "1,0", "--g", "expm1overx"],
        &["apply", "--op", "d", "--f", "flatbump", "--x", "0,1"],
        &["verify", "--suite", "nosuch"],
        &["bell", "3"],
        &["frobnicate"],
    ] {
        let o = flatspec(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?} produced output before failing");
    }
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_flatspec"))
        .args(["bell", "2", "1"])
        .env("FLATSPEC_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn resolve_csv_has_small_residuals() {
    let o = flatspec(&["resolve", "--op", "cesaro", "--lambda", "0.5,0.25", "--g", "expm1overx"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some("# flatspec-csv v1"));
    assert_eq!(lines.next(), Some("x,re,im,residual"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 7);
    assert!(rows.iter().all(|r| r.len() == 4 && r[3] <= 1e-7), "{rows:?}");
}

#[test]
fn apply_and_eval_agree_on_derivative() {
    let a = stdout(&flatspec(&["apply", "--op", "d", "--f", "powerflat(1)", "--x", "0.5"]));
    let e = stdout(&flatspec(&["eval", "--f", "powerflat(1)", "--x", "0.5", "--jet", "1"]));
    let da: Vec<&str> = a.lines().nth(2).unwrap().split(',').collect();
    let de: Vec<&str> = e.lines().nth(3).unwrap().split(',').collect();
    assert_eq!(de[1], "1");
    assert_eq!(da[1], de[2]);
}

#[test]
fn sweep_is_deterministic_and_writes_files() {
    let dir = std::env::temp_dir().join(format!("flatspec-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sweep.csv");
    let args = [
        "sweep", "--op", "mv:-2", "--re", "-1:-0.25:3", "--im", "-0.5:0.5:2", "--f", "expm1overx", "--n", "1",
    ];
    let a = flatspec(&args);
    let b = flatspec(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let mut with_out: Vec<&str> = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    let c = flatspec(&with_out);
    assert_eq!(c.status.code(), Some(0));
    assert!(c.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), a.stdout);
    let s = stdout(&a);
    assert_eq!(s.lines().nth(1), Some("re_lambda,im_lambda,status,profile_1"));
    assert_eq!(s.lines().count(), 2 + 6);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn sweep_marks_spectrum_points() {
    let s = stdout(&flatspec(&[
        "sweep", "--op", "md:2", "--re", "-0.5:0.5:2", "--im", "0:0:1", "--f", "flatbump", "--n", "0",
    ]));
    let rows: Vec<&str> = s.lines().skip(2).collect();
    assert!(rows[0].contains(",ok,"));
    assert!(rows[1].ends_with(",spectrum,nan"));
}

#[test]
fn verify_quick_suites_pass() {
    for suite in ["bell", "seqspace"] {
        let o = flatspec(&["verify", "--suite", suite, "--seed", "5", "--trials", "5"]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        let s = stdout(&o);
        assert!(s.contains("PASS") && !s.contains("FAIL"));
        assert_eq!(s, stdout(&flatspec(&["verify", "--suite", suite, "--seed", "5", "--trials", "5"])));
    }
}

#[test]
fn thread_cap_does_not_change_output() {
    let args = ["sweep", "--op", "cesaro", "--re", "0.5:1:2", "--im", "0:1:2", "--f", "flatbump", "--n", "1"];
    let a = flatspec(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_flatspec"))
        .args(args)
        .env("FLATSPEC_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.stdout, b.stdout);
}
