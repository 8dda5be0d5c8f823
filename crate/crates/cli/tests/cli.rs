use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sl2lines")).current_dir(dir).args(args).output().expect("spawn")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn generate_even_q8() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["generate", "--family", "even", "--q", "8"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "family=even q=8 N=63 dim=7 coherence^2=1/4");
    let text = fs::read_to_string(tmp.path().join("out/even-q8.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["field"], "real");
    assert_eq!(v["family"], "even");
    assert_eq!(v["den"], 8);
    assert_eq!(v["vectors"].as_array().unwrap().len(), 63);
}

#[test]
fn generate_odd_q9_writes_both_halves() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["generate", "--family", "odd", "--q", "9", "--out", "res", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(
        lines,
        ["family=odd+ q=9 N=40 dim=4 coherence^2=1/3", "family=odd- q=9 N=40 dim=4 coherence^2=1/3"]
    );
    for stem in ["odd-plus-q9", "odd-minus-q9"] {
        let sys: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(tmp.path().join(format!("res/{stem}.json"))).unwrap()).unwrap();
        assert_eq!(sys["dim"], 4);
        assert_eq!(sys["vectors"].as_array().unwrap().len(), 40);
        let csv = fs::read_to_string(tmp.path().join(format!("res/{stem}.gram.csv"))).unwrap();
        let mut rows = csv.lines();
        assert_eq!(rows.next(), Some("row,col,num,den"));
        assert_eq!(rows.count(), 40 * 41 / 2);
    }
}

#[test]
fn bad_parameters_exit_2() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["generate", "--family", "even", "--q", "16"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("2^(2k+1)"), "{}", stderr(&o));
    assert!(!tmp.path().join("out").exists());

    for args in [
        &["generate", "--family", "odd", "--q", "8"][..],
        &["generate", "--family", "odd", "--q", "3"],
        &["generate", "--family", "even", "--q", "128"],
        &["generate", "--family", "odd", "--q", "9", "--theta", "sqrt"],
        &["generate", "--q", "8"],
        &["generate", "--family", "even", "--q", "eight"],
        &["selftest", "--q", "12"],
        &["--threads", "0", "selftest"],
    ] {
        let o = run(tmp.path(), args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
    let o = run(tmp.path(), &["generate", "--family", "odd", "--q", "3"]);
    assert!(stderr(&o).contains("3^k"));
}

#[test]
fn certify_round_trip_and_failures() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(run(tmp.path(), &["generate", "--family", "even", "--q", "8"]).status.code(), Some(0));
    let o = run(tmp.path(), &["certify", "--input", "out/even-q8.json", "--out", "certs"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("overall=PASS"));
    let cert: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("certs/even-q8.certificate.json")).unwrap()).unwrap();
    assert_eq!(cert["passed"], true);
    assert_eq!(cert["design_lhs"], serde_json::json!({"num": 189, "den": 1}));

    let basis = r#"{"field":"real","dim":3,"den":1,"vectors":[
        [{"a":1,"b":0},{"a":0,"b":0},{"a":0,"b":0}],
        [{"a":0,"b":0},{"a":1,"b":0},{"a":0,"b":0}],
        [{"a":0,"b":0},{"a":0,"b":0},{"a":1,"b":0}]]}"#;
    fs::write(tmp.path().join("basis.json"), basis).unwrap();
    let o = run(tmp.path(), &["certify", "--input", "basis.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("special_bound_equality"), "{}", stderr(&o));

    let full = fs::read_to_string(tmp.path().join("out/even-q8.json")).unwrap();
    fs::write(tmp.path().join("cut.json"), &full[..full.len() / 2]).unwrap();
    assert_eq!(run(tmp.path(), &["certify", "--input", "cut.json"]).status.code(), Some(3));
    assert_eq!(run(tmp.path(), &["certify", "--input", "missing.json"]).status.code(), Some(3));

    // Well-formed JSON that violates the system's own invariants.
    let bad = r#"{"field":"real","dim":2,"den":1,"vectors":[[{"a":1,"b":0},{"a":1,"b":0}]]}"#;
    fs::write(tmp.path().join("bad.json"), bad).unwrap();
    assert_eq!(run(tmp.path(), &["certify", "--input", "bad.json"]).status.code(), Some(3));
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let files = |dir: &str| {
        let mut names: Vec<_> = fs::read_dir(tmp.path().join(dir)).unwrap().map(|e| e.unwrap().path()).collect();
        names.sort();
        names.iter().map(|p| fs::read(p).unwrap()).collect::<Vec<_>>()
    };
    for out in ["a", "b"] {
        let args = ["generate", "--family", "odd", "--q", "9", "--format", "csv", "--out", out];
        assert_eq!(run(tmp.path(), &args).status.code(), Some(0));
        let args = ["export", "--family", "even", "--q", "8", "--out", out];
        assert_eq!(run(tmp.path(), &args).status.code(), Some(0));
        let args = ["--threads", "1", "generate", "--family", "even", "--q", "8", "--out", out];
        assert_eq!(run(tmp.path(), &args).status.code(), Some(0));
    }
    let a = files("a");
    assert_eq!(a.len(), 7);
    assert_eq!(a, files("b"));
}

#[test]
fn export_writes_audit_artifacts() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["export", "--family", "odd", "--q", "9"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let bessel: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("out/odd-q9.bessel.json")).unwrap()).unwrap();
    assert_eq!(bessel.as_array().unwrap().len(), 80);
    let mats: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("out/odd-q9.matrices.json")).unwrap()).unwrap();
    let mats = mats.as_array().unwrap();
    assert_eq!(mats.len(), 6);
    assert_eq!(mats[0]["variant"], "plus");
    assert_eq!(mats[1]["variant"], "minus");
    assert_eq!(mats[0]["entries"].as_array().unwrap().len(), 4);

    let o = run(tmp.path(), &["export", "--family", "even", "--q", "8", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(tmp.path().join("out/even-q8.gram.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 63 * 64 / 2);
}

#[test]
fn config_file_supplies_defaults() {
    let tmp = TempDir::new().unwrap();
    fs::write(
        tmp.path().join("run.json"),
        r#"{"command": "generate", "family": "odd", "q": 9, "theta": "first", "out": "cfg", "format": "json"}"#,
    )
    .unwrap();
    let o = run(tmp.path(), &["--config", "run.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(tmp.path().join("cfg/odd-plus-q9.json").exists());

    // Flags override the file.
    let o = run(tmp.path(), &["--config", "run.json", "generate", "--family", "even", "--q", "8", "--theta", "sqrt"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(tmp.path().join("cfg/even-q8.json").exists());

    fs::write(tmp.path().join("typo.json"), r#"{"famly": "odd"}"#).unwrap();
    assert_eq!(run(tmp.path(), &["--config", "typo.json", "selftest"]).status.code(), Some(3));
}

#[test]
fn selftest_default_passes() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["selftest", "--out", "report"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.lines().filter(|l| l.starts_with("[PASS]")).count() >= 10);
    assert!(!text.contains("[FAIL]"));
    assert!(tmp.path().join("report/selftest.json").exists());
}

#[test]
fn selftest_values_only_at_128() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["selftest", "--q", "128"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("[PASS] bessel q=128"));
}
