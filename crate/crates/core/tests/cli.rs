use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use salem::cli::{run_with, EXIT_DOMAIN, EXIT_OK, EXIT_USAGE};
use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Run {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("salem").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn config(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, body).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn scalar_outputs() {
    let dir = TempDir::new().unwrap();
    let rev = config(
        &dir,
        "rev.json",
        r#"{"q": 2, "p": [0.5, 0.5], "theta": [1, 0]}"#,
    );
    let id = config(
        &dir,
        "id.json",
        r#"{"q": 2, "p": [0.5, 0.5], "theta": [0, 1]}"#,
    );
    let u4 = config(
        &dir,
        "u4.json",
        r#"{"q": 4, "p": [0.25, 0.25, 0.25, 0.25], "theta": [0, 1, 2, 3]}"#,
    );

    let r = run(&["eval", "--config", s(&rev), "--x", "0.25"]);
    assert_eq!((r.code, r.stdout.as_str()), (EXIT_OK, "0.75\n"));
    let r = run(&["integral", "--config", s(&id)]);
    assert_eq!(r.stdout, "0.5\n");
    let r = run(&["moran", "--config", s(&u4), "--digits", "2,3"]);
    assert_eq!(r.stdout, "0.5\n");
}

#[test]
fn object_outputs() {
    let dir = TempDir::new().unwrap();
    let swap = config(
        &dir,
        "swap.json",
        r#"{"q": 3, "p": [0.3333333333333333, 0.3333333333333333, 0.3333333333333334], "theta": [0, 2, 1]}"#,
    );

    let j: Value =
        serde_json::from_str(&run(&["jump", "--config", s(&swap), "--digits", "1"]).stdout)
            .unwrap();
    assert!((j["left_limit"].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-12);
    assert!((j["right_limit"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-12);
    assert!((j["jump"].as_f64().unwrap() - 0.5).abs() < 1e-12);

    let w: Value = serde_json::from_str(&run(&["witness", "--config", s(&swap)]).stdout).unwrap();
    assert!(w["decreasing"]["x1"].as_f64().unwrap() < w["decreasing"]["x2"].as_f64().unwrap());

    let fx: Value = serde_json::from_str(&run(&["fixedset", "--config", s(&swap)]).stdout).unwrap();
    assert_eq!(fx["kind"], "Singleton");

    let full: Value =
        serde_json::from_str(&run(&["integral", "--config", s(&swap), "--full"]).stdout).unwrap();
    assert!((full["value"].as_f64().unwrap() - 0.5).abs() < 1e-15);

    let maps: Value = serde_json::from_str(&run(&["ifs", "--config", s(&swap)]).stdout).unwrap();
    assert_eq!(maps.as_array().unwrap().len(), 3);
}

#[test]
fn json_outputs_round_trip() {
    let dir = TempDir::new().unwrap();
    let cfg = config(
        &dir,
        "c.json",
        r#"{"q": 3, "p": [0.2, 0.3, 0.5], "theta": [2, 0, 1]}"#,
    );
    let c = s(&cfg);
    let cases: Vec<Vec<&str>> = vec![
        vec!["eval", "--config", c, "--x", "0.4", "--full"],
        vec!["encode", "--config", c, "--x", "0.4", "--depth", "12"],
        vec!["decode", "--config", c, "--digits", "1,0(2)"],
        vec!["jump", "--config", c, "--digits", "2,1"],
        vec!["residual", "--config", c, "--x", "0.37", "--n", "3"],
        vec!["increment", "--config", c, "--digits", "1,2"],
        vec!["rate", "--config", c, "--n", "50", "--seed", "3"],
        vec!["freq", "--config", c, "--n", "1000", "--seed", "1"],
        vec!["integral", "--config", c, "--rank", "6"],
        vec!["moran", "--config", c, "--digits", "0,2", "--full"],
        vec!["dims", "--config", c],
        vec!["fixedset", "--config", c],
        vec!["witness", "--config", c, "--rank", "2"],
        vec!["ifs", "--config", c],
        vec![
            "boxcount", "--config", c, "--depth", "7", "--levels", "2..5",
        ],
        vec!["cover", "--config", c, "--rank", "3"],
    ];
    for args in cases {
        let r = run(&args);
        assert_eq!(r.code, EXIT_OK, "{args:?}: {}", r.stderr);
        let v: Value = serde_json::from_str(&r.stdout).unwrap();
        let again = serde_json::to_string(&v).unwrap() + "\n";
        assert_eq!(again, r.stdout, "{args:?}");
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let cfg = config(
        &dir,
        "c.json",
        r#"{"q": 3, "p": [0.2, 0.3, 0.5], "theta": [0, 2, 1]}"#,
    );
    let c = s(&cfg);
    for args in [
        vec![
            "attractor",
            "--config",
            c,
            "--mode",
            "chaos",
            "--n",
            "2000",
            "--seed",
            "9",
        ],
        vec![
            "attractor",
            "--config",
            c,
            "--depth",
            "6",
            "--format",
            "csv",
        ],
        vec![
            "rate", "--config", c, "--n", "200", "--rank", "100", "--seed", "5",
        ],
        vec![
            "boxcount", "--config", c, "--mode", "chaos", "--n", "5000", "--seed", "2",
        ],
    ] {
        assert_eq!(run(&args).stdout, run(&args).stdout, "{args:?}");
    }
}

#[test]
fn attractor_exports_read_back() {
    let dir = TempDir::new().unwrap();
    let cfg = config(
        &dir,
        "c.json",
        r#"{"q": 2, "p": [0.3, 0.7], "theta": [1, 0]}"#,
    );
    let csv_out = dir.path().join("cloud.csv");
    let r = run(&[
        "attractor",
        "--config",
        s(&cfg),
        "--depth",
        "5",
        "--format",
        "csv",
        "--out",
        s(&csv_out),
    ]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.stdout.is_empty());
    let text = fs::read_to_string(&csv_out).unwrap();
    assert!(text.starts_with("x,y\n"));
    let pts: Vec<(f64, f64)> = salem::ifs::read_csv(text.as_bytes()).unwrap();
    assert_eq!(pts.len(), 32);

    let r = run(&["attractor", "--config", s(&cfg), "--depth", "5"]);
    let lines: Vec<(f64, f64)> = salem::ifs::read_json_lines(r.stdout.as_bytes()).unwrap();
    assert_eq!(lines, pts);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let good = config(
        &dir,
        "good.json",
        r#"{"q": 2, "p": [0.5, 0.5], "theta": [1, 0]}"#,
    );
    let bad_sum = config(
        &dir,
        "sum.json",
        r#"{"q": 2, "p": [0.5, 0.6], "theta": [1, 0]}"#,
    );
    let bad_perm = config(
        &dir,
        "perm.json",
        r#"{"q": 2, "p": [0.5, 0.5], "theta": [1, 1]}"#,
    );
    let garbage = config(&dir, "garbage.json", "{not json");

    assert_eq!(run(&["--help"]).code, EXIT_OK);
    assert_eq!(run(&["--version"]).code, EXIT_OK);
    assert_eq!(run(&[]).code, EXIT_USAGE);
    assert_eq!(run(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(run(&["eval", "--config", s(&good)]).code, EXIT_USAGE);
    assert_eq!(
        run(&["eval", "--config", s(&good), "--x", "abc"]).code,
        EXIT_USAGE
    );
    assert_eq!(
        run(&["eval", "--config", "/nonexistent/c.json", "--x", "0.5"]).code,
        EXIT_USAGE
    );
    assert_eq!(
        run(&["eval", "--config", s(&garbage), "--x", "0.5"]).code,
        EXIT_USAGE
    );
    assert_eq!(
        run(&["decode", "--config", s(&good), "--digits", "1,x"]).code,
        EXIT_USAGE
    );
    assert_eq!(run(&["attractor", "--config", s(&good)]).code, EXIT_USAGE);

    let r = run(&["eval", "--config", s(&good), "--x", "1.5"]);
    assert_eq!(r.code, EXIT_DOMAIN);
    assert!(r.stderr.contains("outside"));
    assert_eq!(
        run(&["eval", "--config", s(&bad_sum), "--x", "0.5"]).code,
        EXIT_DOMAIN
    );
    assert_eq!(
        run(&["eval", "--config", s(&bad_perm), "--x", "0.5"]).code,
        EXIT_DOMAIN
    );
    assert_eq!(
        run(&["decode", "--config", s(&good), "--digits", "1,2"]).code,
        EXIT_DOMAIN
    );
    assert_eq!(
        run(&["cover", "--config", s(&good), "--rank", "0"]).code,
        EXIT_DOMAIN
    );
    assert_eq!(
        run(&["jump", "--config", s(&good), "--digits", "0(0,1)"]).code,
        EXIT_DOMAIN
    );
    assert_eq!(
        run(&["eval", "--config", s(&good), "--x", "-0.5"]).code,
        EXIT_DOMAIN
    );
}

#[test]
fn binary_exit_codes() {
    let dir = TempDir::new().unwrap();
    let good = config(
        &dir,
        "good.json",
        r#"{"q": 2, "p": [0.5, 0.5], "theta": [1, 0]}"#,
    );
    let bin = env!("CARGO_BIN_EXE_salem");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap();

    let ok = status(&["eval", "--config", s(&good), "--x", "0.25"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&ok.stdout), "0.75\n");
    assert_eq!(status(&["eval"]).status.code(), Some(2));
    assert_eq!(
        status(&["eval", "--config", s(&good), "--x", "-1"])
            .status
            .code(),
        Some(3)
    );
}
